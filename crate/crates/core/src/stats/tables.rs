//! Rendering a [`StatsReport`] as CSV and as aligned text.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::arith::Word;
use crate::error::{Error, Result};

use super::{decade_exponent, StatsReport};

/// Decimal places of k values.
pub const K_PLACES: usize = 5;
/// Decimal places of growth ratios.
pub const RATIO_PLACES: usize = 3;
/// Decimal places of power exponents.
pub const EXPONENT_PLACES: usize = 5;

/// `x` with `places` decimals, ties to even.
///
/// Rounding happens on the exact binary value of `x`, so only values whose
/// binary expansion ends exactly on a half are ties.
pub fn format_real(x: f64, places: usize) -> String {
    // std formatting is exact and rounds ties to even
    format!("{x:.places$}")
}

/// One table of the report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableKind {
    Counts,
    CountsByD,
    K,
    Ratios,
    Exponents,
    Residues,
    Primes,
    LeastPrimes,
    Records,
}

impl TableKind {
    pub const ALL: [TableKind; 9] = [
        Self::Counts,
        Self::CountsByD,
        Self::K,
        Self::Ratios,
        Self::Exponents,
        Self::Residues,
        Self::Primes,
        Self::LeastPrimes,
        Self::Records,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Counts => "counts",
            Self::CountsByD => "counts_by_d",
            Self::K => "k",
            Self::Ratios => "ratios",
            Self::Exponents => "exponents",
            Self::Residues => "residues",
            Self::Primes => "primes",
            Self::LeastPrimes => "least_primes",
            Self::Records => "records",
        }
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|t| t.name()).collect();
                Error::InvalidArgument(format!(
                    "unknown table {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Column labels and rows of one rendered table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Text label of a checkpoint: `10^n`, `25.10^9`, or the plain number.
pub fn checkpoint_label<W: Word>(x: W) -> String {
    if let Some(n) = decade_exponent(x) {
        return format!("10^{n}");
    }
    let mut n = 0;
    let mut m = x;
    let ten = W::from_u64(10);
    while (m % ten).is_zero() {
        m = m / ten;
        n += 1;
    }
    if n >= 3 {
        format!("{m}.10^{n}")
    } else {
        x.to_string()
    }
}

/// Build the grid of `kind`. The text variant labels checkpoints as powers
/// of ten and, for even moduli, leaves out the even residue classes (no
/// Carmichael number lies in them).
pub fn grid<W: Word>(report: &StatsReport<W>, kind: TableKind, text: bool) -> Grid {
    let cps = &report.checkpoints;
    let cp_label = |x: &W| {
        if text {
            checkpoint_label(*x)
        } else {
            x.to_string()
        }
    };
    let cp_header = || cps.iter().map(cp_label).collect::<Vec<_>>();
    let strings = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    match kind {
        TableKind::Counts => Grid {
            header: strings(&["x", "count"]),
            rows: report
                .counts
                .iter()
                .map(|(x, c)| vec![cp_label(x), c.to_string()])
                .collect(),
        },
        TableKind::CountsByD => {
            let ds = report.factor_counts();
            let mut header = vec!["x".to_string()];
            header.extend(ds.iter().map(|d| format!("d{d}")));
            header.push("total".into());
            let rows = report
                .counts
                .iter()
                .map(|(x, c)| {
                    let mut row = vec![cp_label(x)];
                    row.extend(ds.iter().map(|&d| report.counts_by_d[&(d, *x)].to_string()));
                    row.push(c.to_string());
                    row
                })
                .collect();
            Grid { header, rows }
        }
        TableKind::K => Grid {
            header: strings(&["x", "log10_x", "k"]),
            rows: report
                .k_values
                .iter()
                .map(|(x, k)| {
                    let log10 = (x.as_wide() as f64).log10();
                    vec![
                        cp_label(x),
                        format_real(log10, 5),
                        format_real(*k, K_PLACES),
                    ]
                })
                .collect(),
        },
        TableKind::Ratios => Grid {
            header: strings(&["n", "ratio"]),
            rows: report
                .ratios
                .iter()
                .map(|(n, r)| vec![n.to_string(), format_real(*r, RATIO_PLACES)])
                .collect(),
        },
        TableKind::Exponents => Grid {
            header: strings(&["n", "exponent"]),
            rows: report
                .exponents
                .iter()
                .map(|(n, e)| vec![n.to_string(), format_real(*e, EXPONENT_PLACES)])
                .collect(),
        },
        TableKind::Residues => {
            let mut header = strings(&["m", "class"]);
            header.extend(cp_header());
            let mut rows = Vec::new();
            for &m in &report.moduli {
                for class in 0..m {
                    if text && m % 2 == 0 && class % 2 == 0 {
                        continue;
                    }
                    let mut row = vec![m.to_string(), class.to_string()];
                    row.extend(
                        cps.iter()
                            .map(|x| report.residue_tables[&(m, class, *x)].to_string()),
                    );
                    rows.push(row);
                }
            }
            Grid { header, rows }
        }
        TableKind::Primes | TableKind::LeastPrimes => {
            let table = if kind == TableKind::Primes {
                &report.prime_divisor_counts
            } else {
                &report.least_prime_counts
            };
            let mut header = vec!["p".to_string()];
            header.extend(cp_header());
            let rows = report
                .primes
                .iter()
                .map(|&p| {
                    let mut row = vec![p.to_string()];
                    row.extend(cps.iter().map(|x| table[&(p, *x)].to_string()));
                    row
                })
                .collect();
            Grid { header, rows }
        }
        TableKind::Records => {
            let mut rows = Vec::new();
            if let Some(r) = &report.records {
                for (name, rec) in [
                    ("largest_prime_factor", &r.largest_prime_factor),
                    ("largest_least_prime_factor", &r.largest_least_prime_factor),
                ] {
                    let factors: Vec<String> =
                        rec.host.factors().iter().map(|p| p.to_string()).collect();
                    rows.push(vec![
                        name.to_string(),
                        rec.prime.to_string(),
                        rec.host.value().to_string(),
                        factors.join(" "),
                    ]);
                }
            }
            Grid {
                header: strings(&["record", "prime", "value", "factors"]),
                rows,
            }
        }
    }
}

pub fn write_csv<W: Word, O: Write>(
    report: &StatsReport<W>,
    kind: TableKind,
    out: O,
) -> Result<()> {
    let g = grid(report, kind, false);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&g.header)?;
    for row in &g.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Right-aligned columns separated by two spaces; the first column is
/// left-aligned.
pub fn write_text<W: Word, O: Write>(
    report: &StatsReport<W>,
    kind: TableKind,
    mut out: O,
) -> Result<()> {
    let g = grid(report, kind, true);
    let mut widths: Vec<usize> = g.header.iter().map(|h| h.chars().count()).collect();
    for row in &g.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    for line in std::iter::once(&g.header).chain(&g.rows) {
        let cells: Vec<String> = line
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, &w))| {
                if i == 0 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        writeln!(out, "{}", cells.join("  ").trim_end())?;
    }
    Ok(())
}

/// Write `<name>.csv` and `<name>.txt` for every requested table into
/// `dir`, returning the paths written.
pub fn write_tables<W: Word>(
    report: &StatsReport<W>,
    kinds: &[TableKind],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for &kind in kinds {
        let csv_path = dir.join(format!("{}.csv", kind.name()));
        let mut f = BufWriter::new(File::create(&csv_path)?);
        write_csv(report, kind, &mut f)?;
        f.flush()?;
        let txt_path = dir.join(format!("{}.txt", kind.name()));
        let mut f = BufWriter::new(File::create(&txt_path)?);
        write_text(report, kind, &mut f)?;
        f.flush()?;
        written.push(csv_path);
        written.push(txt_path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::korselt::oracle_enumerate;
    use crate::stats::{compute_report, CheckpointList, StatsSpec};

    #[test]
    fn rounding_ties_to_even() {
        // exact binary ties
        assert_eq!(format_real(0.125, 2), "0.12");
        assert_eq!(format_real(0.375, 2), "0.38");
        assert_eq!(format_real(2.5, 0), "2");
        assert_eq!(format_real(3.5, 0), "4");
        assert_eq!(format_real(7.0, 3), "7.000");
        assert_eq!(format_real(1.864064, 5), "1.86406");
    }

    #[test]
    fn labels() {
        assert_eq!(checkpoint_label(1000u64), "10^3");
        assert_eq!(checkpoint_label(25_000_000_000u64), "25.10^9");
        assert_eq!(checkpoint_label(1234u64), "1234");
    }

    #[test]
    fn table_names_parse() {
        for t in TableKind::ALL {
            assert_eq!(t.name().parse::<TableKind>().unwrap(), t);
        }
        assert_eq!(
            "least-primes".parse::<TableKind>().unwrap(),
            TableKind::LeastPrimes
        );
        assert!("nope".parse::<TableKind>().is_err());
    }

    #[test]
    fn small_report_renders() {
        let cat = oracle_enumerate(1_000_000).unwrap();
        let cps = CheckpointList::default_for(1_000_000u64).unwrap();
        let report = compute_report(cat.entries(), StatsSpec::new(cps), Some(1_000_000)).unwrap();
        let mut buf = Vec::new();
        write_csv(&report, TableKind::Counts, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x,count\n1000,1\n10000,7\n100000,16\n1000000,43\n"
        );
        let mut buf = Vec::new();
        write_text(&report, TableKind::Ratios, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n  ratio\n4  7.000\n5  2.286\n6  2.688\n"
        );
        let mut buf = Vec::new();
        write_text(&report, TableKind::Residues, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().next().unwrap().ends_with("10^6"));
        // mod 12 shows the six odd classes only
        assert_eq!(text.lines().filter(|l| l.starts_with("12 ")).count(), 6);
        let dir = tempfile::tempdir().unwrap();
        let paths = write_tables(&report, &TableKind::ALL, dir.path()).unwrap();
        assert_eq!(paths.len(), 18);
    }
}
