//! CSV, JSON and SVG renderings of experiment results.

use std::fmt::Write as _;

use serde::Serialize;

use crate::asymptotes::{AsymptoteRow, NotPrimeBreakdown, NotPrimeSource, PeriodicComposite};
use crate::density_lab::{
    Band, ClassStats, CubicCheckpoint, Figure1Grid, FitResult, InteractionGrid, McReport,
    RankedTable, Segment, SEGMENTS,
};
use crate::error::Result;

fn csv_from_rows<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Truncate to `places` decimals, as the printed tables do.
pub fn truncate(v: f64, places: i32) -> String {
    let f = 10f64.powi(places);
    format!("{:.*}", places as usize, (v * f + 1e-9).trunc() / f)
}

fn fixed(v: f64, places: usize) -> String {
    format!("{v:.places$}")
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// `{ "config": ..., "report": ... }`, pretty-printed with a trailing newline.
pub fn json_report<C: Serialize, T: Serialize>(config: &C, report: &T) -> Result<String> {
    #[derive(Serialize)]
    struct Envelope<'a, C, T> {
        config: &'a C,
        report: &'a T,
    }
    let mut s = serde_json::to_string_pretty(&Envelope { config, report })?;
    s.push('\n');
    Ok(s)
}

pub fn ranked_csv(table: &RankedTable) -> Result<String> {
    csv_from_rows(
        &["rank", "x", "score", "is_prime", "cumulative_primes"],
        table.entries.iter().enumerate().map(|(r, e)| {
            [
                (r + 1).to_string(),
                e.x.to_string(),
                e.score.to_string(),
                u8::from(e.is_prime).to_string(),
                table.cumulative_primes[r].to_string(),
            ]
        }),
    )
}

pub fn table1_csv(bands: &[Band]) -> Result<String> {
    csv_from_rows(
        &["Colour Code", "BiEntropy", "Count", "Prime", "Prime Proportion"],
        bands.iter().map(|b| {
            [
                b.colour.name().to_string(),
                format!("< {:.2}", b.hi),
                b.count.to_string(),
                b.primes.to_string(),
                truncate(b.proportion, 4),
            ]
        }),
    )
}

pub fn table2_csv(stats: &[ClassStats]) -> Result<String> {
    let mut header = vec![""];
    header.extend(stats.iter().map(|s| s.class.label()));
    let row = |label: &str, f: &dyn Fn(&ClassStats) -> String| {
        std::iter::once(label.to_string())
            .chain(stats.iter().map(f))
            .collect::<Vec<_>>()
    };
    csv_from_rows(
        &header,
        [
            row("Mean", &|s| fixed(s.mean, 4)),
            row("S.Dev", &|s| fixed(s.stddev, 4)),
            row("N", &|s| s.n.to_string()),
        ],
    )
}

pub fn table3_csv(segments: &[Segment]) -> Result<String> {
    csv_from_rows(
        &["Segment", "BiEntropy <=", "Primes"],
        segments.iter().map(|s| {
            [
                s.index.to_string(),
                fixed(s.upper_score, 4),
                s.primes.to_string(),
            ]
        }),
    )
}

/// One row per index `1..=n`; each labelled fit contributes its series, fitted
/// curve and residual.
pub fn fit_csv(columns: &[(&str, &FitResult)], actual: &[&[f64]]) -> Result<String> {
    let n = actual.iter().map(|a| a.len()).max().unwrap_or(0);
    let mut header = vec!["i".to_string()];
    for (label, _) in columns {
        for suffix in ["actual", "fitted", "residual"] {
            header.push(format!("{label}_{suffix}"));
        }
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_from_rows(
        &header,
        (0..n).map(|i| {
            let mut row = vec![(i + 1).to_string()];
            for ((_, fit), series) in columns.iter().zip(actual) {
                let cell = |v: Option<&f64>| v.map(f64::to_string).unwrap_or_default();
                row.push(cell(series.get(i)));
                row.push(cell(fit.fitted.get(i)));
                row.push(cell(fit.residuals.get(i)));
            }
            row
        }),
    )
}

pub fn monte_carlo_csv(mc: &McReport) -> Result<String> {
    csv_from_rows(
        &[
            "rank",
            "x",
            "score",
            "is_prime",
            "ranked_cumulative",
            "natural_minus_ranked",
            "delta",
            "half_delta_squared",
            "error",
        ],
        mc.ranked.entries.iter().enumerate().map(|(r, e)| {
            let i = r + 1;
            [
                i.to_string(),
                e.x.to_string(),
                e.score.to_string(),
                u8::from(e.is_prime).to_string(),
                mc.ranked.cumulative_primes[r].to_string(),
                mc.delta_series[i].to_string(),
                mc.theoretical_delta[i].to_string(),
                mc.half_delta_squared[i].to_string(),
                mc.errors[r].to_string(),
            ]
        }),
    )
}

pub fn asymptote_csv(rows: &[AsymptoteRow]) -> Result<String> {
    csv_from_rows(
        &["n", "argument_exponent", "term", "partial_sum", "actual_count", "ratio"],
        rows.iter().map(|r| {
            [
                r.n.to_string(),
                r.exponent.to_string(),
                r.term.to_string(),
                r.partial_sum.to_string(),
                r.actual_count.to_string(),
                opt(r.ratio),
            ]
        }),
    )
}

pub fn not_prime_csv(b: &NotPrimeBreakdown) -> Result<String> {
    let mut rows: Vec<[String; 3]> = b
        .sources
        .iter()
        .map(|(src, count)| {
            let name = match src {
                NotPrimeSource::AllOnes => "all-ones".to_string(),
                NotPrimeSource::ZeroDerivative(k) => format!("d{k}-zero"),
            };
            [name, count.to_string(), b.denominator.to_string()]
        })
        .collect();
    rows.push([
        "total".to_string(),
        b.numerator().to_string(),
        b.denominator.to_string(),
    ]);
    csv_from_rows(&["source", "count", "denominator"], rows)
}

pub fn appendix1_csv(rows: &[PeriodicComposite]) -> Result<String> {
    csv_from_rows(
        &["Bits", "Binary", "Decimal", "BiEntropy"],
        rows.iter().map(|r| {
            [
                r.bits.to_string(),
                r.binary.clone(),
                r.decimal.to_string(),
                fixed(r.bien, 2),
            ]
        }),
    )
}

pub fn figure1_csv(grid: &Figure1Grid) -> Result<String> {
    csv_from_rows(
        &["row", "col", "x", "bien", "colour", "prime"],
        grid.cells.iter().enumerate().flat_map(|(r, row)| {
            row.iter().enumerate().map(move |(c, cell)| {
                [
                    r.to_string(),
                    c.to_string(),
                    cell.x.to_string(),
                    cell.bien.to_string(),
                    cell.colour().name().to_string(),
                    u8::from(cell.prime).to_string(),
                ]
            })
        }),
    )
}

pub fn interaction_csv(grid: &InteractionGrid) -> Result<String> {
    csv_from_rows(
        &["bien_segment", "trien_segment", "members", "primes", "sixes"],
        grid.cells.iter().enumerate().flat_map(|(b, row)| {
            row.iter().enumerate().map(move |(t, c)| {
                let members: Vec<String> = c.members.iter().map(u64::to_string).collect();
                [
                    b.to_string(),
                    t.to_string(),
                    members.join(" "),
                    c.primes.to_string(),
                    c.sixes.to_string(),
                ]
            })
        }),
    )
}

pub fn cubics_csv(rows: &[CubicCheckpoint]) -> Result<String> {
    csv_from_rows(
        &["x", "bits", "trits", "a", "b", "c", "endpoint", "primes", "relative_error"],
        rows.iter().map(|r| {
            [
                r.x.to_string(),
                r.widths.bits.to_string(),
                r.widths.trits.to_string(),
                r.fit.coefficients[0].to_string(),
                r.fit.coefficients[1].to_string(),
                r.fit.coefficients[2].to_string(),
                r.endpoint.to_string(),
                r.primes.to_string(),
                r.relative_error.to_string(),
            ]
        }),
    )
}

const CELL: usize = 32;
const MARGIN: usize = 40;

fn svg_open(out: &mut String, size: usize) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="monospace" font-size="10">"#
    );
    let _ = writeln!(out, r##"<rect width="{size}" height="{size}" fill="#FFFFFF"/>"##);
}

/// The 16x16 BiEntropy grid, primes in purple.
pub fn figure1_svg(grid: &Figure1Grid) -> String {
    let size = 2 * MARGIN + 16 * CELL;
    let mut out = String::new();
    svg_open(&mut out, size);
    for (i, nib) in grid.nibble_order.iter().enumerate() {
        let pos = MARGIN + i * CELL + CELL / 2;
        let _ = writeln!(
            out,
            r#"<text x="{pos}" y="{}" text-anchor="middle">{nib:04b}</text>"#,
            MARGIN - 8
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{pos}" text-anchor="end" dominant-baseline="middle">{nib:04b}</text>"#,
            MARGIN - 4
        );
    }
    for (r, row) in grid.cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let (x, y) = (MARGIN + c * CELL, MARGIN + r * CELL);
            let colour = cell.colour();
            let text = if cell.prime { "#FFFFFF" } else { "#000000" };
            let _ = writeln!(
                out,
                r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="#999999"/>"##,
                colour.hex()
            );
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle" dominant-baseline="middle" fill="{text}">{}</text>"#,
                x + CELL / 2,
                y + CELL / 2,
                cell.x
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Signed counts per cell: primes positive (blue), multiples of six negative
/// (red), collisions yellow. BiEntropy segment runs along x, TriEntropy up y.
pub fn interaction_svg(grid: &InteractionGrid) -> String {
    let size = 2 * MARGIN + SEGMENTS * CELL;
    let mut out = String::new();
    svg_open(&mut out, size);
    for b in 0..SEGMENTS {
        for t in 0..SEGMENTS {
            let c = &grid.cells[b][t];
            let (x, y) = (MARGIN + b * CELL, MARGIN + (SEGMENTS - 1 - t) * CELL);
            let fill = if grid.collisions.contains(&(b, t)) {
                "#FFD700"
            } else if c.primes > 0 {
                "#3366CC"
            } else if c.sixes > 0 {
                "#CC0000"
            } else {
                "#FFFFFF"
            };
            let _ = writeln!(
                out,
                r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#999999"/>"##
            );
            let label = match (c.primes, c.sixes) {
                (0, 0) => String::new(),
                (p, 0) => p.to_string(),
                (0, s) => format!("-{s}"),
                (p, s) => format!("{p}/-{s}"),
            };
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle" dominant-baseline="middle">{label}</text>"#,
                x + CELL / 2,
                y + CELL / 2
            );
        }
    }
    for i in 0..SEGMENTS {
        let pos = MARGIN + i * CELL + CELL / 2;
        let _ = writeln!(
            out,
            r#"<text x="{pos}" y="{}" text-anchor="middle">{i}</text>"#,
            size - MARGIN + 14
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end" dominant-baseline="middle">{i}</text>"#,
            MARGIN - 4,
            MARGIN + (SEGMENTS - 1 - i) * CELL + CELL / 2
        );
    }
    out.push_str("</svg>\n");
    out
}
