//! Carmichael catalogs: ordered collections of entries and their text format.
//!
//! File format (UTF-8, one record per line):
//!
//! ```text
//! # carmichael catalog v1
//! # generator carmichael 0.1.0
//! # limit 10000
//! # factors 3..4
//! 561 3 11 17
//! 1105 5 13 17
//! ```
//!
//! Lines starting with `#` are header or comment lines. Each record is the
//! decimal value of N followed by its ascending prime factors, separated by
//! single spaces, newline-terminated, with no trailing whitespace. Records
//! are strictly ascending. Files whose name ends in `.gz` are gzip
//! compressed.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::arith::Word;
use crate::error::{Error, Result};
use crate::korselt::korselt_violation;
use crate::primes::{is_prime, Factorization};

pub const FORMAT_TAG: &str = "carmichael catalog v1";
pub const GENERATOR: &str = concat!("carmichael ", env!("CARGO_PKG_VERSION"));

/// One Carmichael number with its ascending prime factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CarmichaelEntry<W> {
    value: W,
    factors: Vec<W>,
}

impl<W: Word> CarmichaelEntry<W> {
    /// Checked constructor: enforces every entry invariant, including
    /// primality of the factors and Korselt's criterion.
    pub fn new(value: W, factors: Vec<W>) -> Result<Self> {
        let entry = Self { value, factors };
        entry.validate()?;
        Ok(entry)
    }

    /// Constructor without validation, for trusted sources.
    pub fn new_unchecked(value: W, factors: Vec<W>) -> Self {
        Self { value, factors }
    }

    pub fn value(&self) -> W {
        self.value
    }

    pub fn factors(&self) -> &[W] {
        &self.factors
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn least_factor(&self) -> W {
        self.factors[0]
    }

    pub fn largest_factor(&self) -> W {
        self.factors[self.factors.len() - 1]
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Error::Validation {
            value: self.value.to_string(),
            reason,
        };
        if self.factors.len() < 3 {
            return Err(fail(format!(
                "{} factors, need at least 3",
                self.factors.len()
            )));
        }
        if let Some(p) = self.factors.iter().find(|&&p| !is_prime(p)) {
            return Err(fail(format!("factor {p} is not prime")));
        }
        let f = Factorization::from_primes(&self.factors)
            .map_err(|_| fail("factors not strictly ascending".into()))?;
        if f.value() != Some(self.value) {
            return Err(fail("factors do not multiply to the value".into()));
        }
        if let Some(v) = korselt_violation(self.value, &f) {
            return Err(fail(v.to_string()));
        }
        Ok(())
    }

    pub fn widen(&self) -> CarmichaelEntry<u128> {
        CarmichaelEntry {
            value: self.value.as_wide(),
            factors: self.factors.iter().map(|p| p.as_wide()).collect(),
        }
    }
}

impl<W: Word> fmt::Display for CarmichaelEntry<W> {
    /// The catalog record: `561 3 11 17`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)?;
        for p in &self.factors {
            write!(f, " {p}")?;
        }
        Ok(())
    }
}

/// Provenance header: the search parameters that produced a catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance<W> {
    /// Every Carmichael number below this bound (with a factor count in
    /// range) is present.
    pub limit: W,
    pub min_factors: u32,
    pub max_factors: u32,
}

/// Ordered, duplicate-free list of entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog<W = u64> {
    provenance: Option<Provenance<W>>,
    entries: Vec<CarmichaelEntry<W>>,
}

impl<W: Word> Catalog<W> {
    /// Sorts and checks for duplicates.
    pub fn from_entries(
        provenance: Option<Provenance<W>>,
        mut entries: Vec<CarmichaelEntry<W>>,
    ) -> Result<Self> {
        entries.sort_unstable_by_key(|e| e.value);
        if let Some(w) = entries.windows(2).find(|w| w[0].value == w[1].value) {
            return Err(Error::Integrity(format!("duplicate entry {}", w[0].value)));
        }
        Ok(Self {
            provenance,
            entries,
        })
    }

    pub fn empty(provenance: Option<Provenance<W>>) -> Self {
        Self {
            provenance,
            entries: Vec::new(),
        }
    }

    pub fn provenance(&self) -> Option<&Provenance<W>> {
        self.provenance.as_ref()
    }

    pub fn entries(&self) -> &[CarmichaelEntry<W>] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<CarmichaelEntry<W>> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = W> + '_ {
        self.entries.iter().map(|e| e.value)
    }

    /// Number of entries with exactly `d` factors.
    pub fn count_with_factors(&self, d: usize) -> usize {
        self.entries
            .iter()
            .filter(|e| e.factor_count() == d)
            .count()
    }

    pub fn validate(&self) -> Result<()> {
        self.entries.iter().try_for_each(|e| e.validate())
    }
}

/// Write `catalog` in the text format.
pub fn write_catalog<W: Word, O: Write>(catalog: &Catalog<W>, mut out: O) -> Result<()> {
    writeln!(out, "# {FORMAT_TAG}")?;
    writeln!(out, "# generator {GENERATOR}")?;
    if let Some(p) = &catalog.provenance {
        writeln!(out, "# limit {}", p.limit)?;
        writeln!(out, "# factors {}..{}", p.min_factors, p.max_factors)?;
    }
    for e in &catalog.entries {
        writeln!(out, "{e}")?;
    }
    out.flush()?;
    Ok(())
}

/// Write to a path; gzip when the name ends in `.gz`.
pub fn write_catalog_file<W: Word>(catalog: &Catalog<W>, path: &Path) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    if is_gzip(path) {
        let mut enc = GzEncoder::new(file, Compression::default());
        write_catalog(catalog, &mut enc)?;
        enc.finish()?.flush()?;
        Ok(())
    } else {
        write_catalog(catalog, file)
    }
}

fn is_gzip(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gz"))
}

/// Streaming reader over catalog records.
///
/// The header is consumed at construction; records are then yielded one at
/// a time, so statistics can be computed without loading a whole catalog.
pub struct CatalogReader<W, R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    provenance: Option<Provenance<W>>,
    pending: Option<(usize, String)>,
    previous: Option<W>,
    validate: bool,
}

impl<W: Word, R: BufRead> CatalogReader<W, R> {
    pub fn new(source: R, validate: bool) -> Result<Self> {
        let mut reader = Self {
            lines: source.lines(),
            line_no: 0,
            provenance: None,
            pending: None,
            previous: None,
            validate,
        };
        reader.read_header()?;
        Ok(reader)
    }

    pub fn provenance(&self) -> Option<&Provenance<W>> {
        self.provenance.as_ref()
    }

    fn read_header(&mut self) -> Result<()> {
        let mut limit: Option<W> = None;
        let mut range: Option<(u32, u32)> = None;
        for line in self.lines.by_ref() {
            self.line_no += 1;
            let line = line?;
            let Some(comment) = line.strip_prefix('#') else {
                self.pending = Some((self.line_no, line));
                break;
            };
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("limit ") {
                limit = Some(parse_num(v.trim(), self.line_no)?);
            } else if let Some(v) = comment.strip_prefix("factors ") {
                let (a, b) = v.trim().split_once("..").ok_or_else(|| Error::Parse {
                    line: self.line_no,
                    message: format!("bad factor range {v:?}"),
                })?;
                range = Some((parse_num(a, self.line_no)?, parse_num(b, self.line_no)?));
            }
        }
        self.provenance = match (limit, range) {
            (Some(limit), Some((min_factors, max_factors))) => Some(Provenance {
                limit,
                min_factors,
                max_factors,
            }),
            (None, None) => None,
            _ => {
                return Err(Error::Format(
                    "header must give both limit and factor range".into(),
                ))
            }
        };
        Ok(())
    }

    fn parse_record(&mut self, line_no: usize, line: &str) -> Result<CarmichaelEntry<W>> {
        if line.is_empty() || line.ends_with(char::is_whitespace) || line.contains("  ") {
            return Err(Error::Parse {
                line: line_no,
                message: "malformed record spacing".into(),
            });
        }
        let mut fields = line.split(' ');
        let value: W = parse_num(fields.next().unwrap_or_default(), line_no)?;
        let factors = fields
            .map(|f| parse_num(f, line_no))
            .collect::<Result<Vec<W>>>()?;
        if factors.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "record has no factors".into(),
            });
        }
        if let Some(prev) = self.previous {
            if value <= prev {
                return Err(Error::Format(format!(
                    "line {line_no}: {value} does not follow {prev} in ascending order"
                )));
            }
        }
        self.previous = Some(value);
        let entry = CarmichaelEntry::new_unchecked(value, factors);
        if self.validate {
            entry.validate()?;
        }
        Ok(entry)
    }
}

impl<W: Word, R: BufRead> Iterator for CatalogReader<W, R> {
    type Item = Result<CarmichaelEntry<W>>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let (line_no, line) = match self.pending.take() {
                Some(p) => p,
                None => {
                    let line = self.lines.next()?;
                    self.line_no += 1;
                    match line {
                        Ok(l) => (self.line_no, l),
                        Err(e) => return Some(Err(e.into())),
                    }
                }
            };
            if line.starts_with('#') {
                continue;
            }
            return Some(self.parse_record(line_no, &line));
        }
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: {s:?}"),
    })
}

/// Read a whole catalog.
pub fn read_catalog<W: Word, R: BufRead>(source: R, validate: bool) -> Result<Catalog<W>> {
    let mut reader = CatalogReader::new(source, validate)?;
    let entries = reader.by_ref().collect::<Result<Vec<_>>>()?;
    Ok(Catalog {
        provenance: reader.provenance,
        entries,
    })
}

/// Open a catalog file for streaming, decompressing `.gz` files.
pub fn open_catalog<W: Word>(
    path: &Path,
    validate: bool,
) -> Result<CatalogReader<W, Box<dyn BufRead>>> {
    let file = File::open(path)?;
    let source: Box<dyn BufRead> = if is_gzip(path) {
        Box::new(BufReader::new(GzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    };
    CatalogReader::new(source, validate)
}

pub fn read_catalog_file<W: Word>(path: &Path, validate: bool) -> Result<Catalog<W>> {
    let mut reader = open_catalog(path, validate)?;
    let entries = reader.by_ref().collect::<Result<Vec<_>>>()?;
    Ok(Catalog {
        provenance: reader.provenance,
        entries,
    })
}

/// Sorted union of catalogs.
///
/// Equal values with equal factorizations collapse; equal values with
/// different factorizations are an integrity error. The merged provenance
/// survives only when every input shares one limit and the factor ranges
/// overlap or abut.
pub fn merge<W: Word>(catalogs: &[Catalog<W>]) -> Result<Catalog<W>> {
    let mut all: Vec<CarmichaelEntry<W>> = catalogs
        .iter()
        .flat_map(|c| c.entries.iter().cloned())
        .collect();
    all.sort_by_key(|a| a.value);
    let mut entries: Vec<CarmichaelEntry<W>> = Vec::with_capacity(all.len());
    for e in all {
        match entries.last() {
            Some(last) if last.value == e.value => {
                if last.factors != e.factors {
                    return Err(Error::Integrity(format!(
                        "{} appears with factors {:?} and {:?}",
                        e.value, last.factors, e.factors
                    )));
                }
            }
            _ => entries.push(e),
        }
    }
    Ok(Catalog {
        provenance: merged_provenance(catalogs),
        entries,
    })
}

fn merged_provenance<W: Word>(catalogs: &[Catalog<W>]) -> Option<Provenance<W>> {
    let mut ranges: Vec<&Provenance<W>> = catalogs
        .iter()
        .map(|c| c.provenance.as_ref())
        .collect::<Option<Vec<_>>>()?;
    let limit = ranges.first()?.limit;
    if ranges.iter().any(|p| p.limit != limit) {
        return None;
    }
    ranges.sort_by_key(|p| p.min_factors);
    let mut lo = ranges[0].min_factors;
    let mut hi = ranges[0].max_factors;
    for p in &ranges[1..] {
        if p.min_factors > hi + 1 {
            return None;
        }
        lo = lo.min(p.min_factors);
        hi = hi.max(p.max_factors);
    }
    Some(Provenance {
        limit,
        min_factors: lo,
        max_factors: hi,
    })
}
