//! Monthly return panels, skewness deciles and the cross-decile agreement table.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::distributions::{moments_of, MomentSummary};
use crate::dominance::mvc_test;
use crate::error::{Error, Result};
use crate::simulation::markdown_table;
use crate::utility::{sample_expected_utility, UtilitySpec};

/// Minimum non-missing observations for a ticker to be kept, and minimum
/// overlapping periods for a pair to be compared.
pub const MIN_OBSERVATIONS: usize = 24;

/// Returns per ticker on a shared calendar of periods.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsTable {
    pub tickers: Vec<String>,
    pub periods: Vec<String>,
    /// `returns[t][p]` is ticker `t` in period `p`.
    pub returns: Vec<Vec<Option<f64>>>,
    /// Tickers removed by the minimum-observations rule, with their counts.
    pub dropped: Vec<(String, usize)>,
}

impl ReturnsTable {
    pub fn index_of(&self, ticker: &str) -> Option<usize> {
        self.tickers.iter().position(|t| t == ticker)
    }

    /// Non-missing returns of one ticker.
    pub fn observed(&self, t: usize) -> Vec<f64> {
        self.returns[t].iter().flatten().copied().collect()
    }

    /// Returns of two tickers over the periods where both are observed.
    pub fn overlap(&self, a: usize, b: usize) -> (Vec<f64>, Vec<f64>) {
        self.returns[a]
            .iter()
            .zip(&self.returns[b])
            .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
            .unzip()
    }
}

fn is_iso_date(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter()
            .enumerate()
            .all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit())
        && (1..=12).contains(&s[5..7].parse::<u32>().unwrap_or(0))
        && (1..=31).contains(&s[8..10].parse::<u32>().unwrap_or(0))
}

/// Parses a `date,<ticker>,...` CSV from any reader; `source` names it in errors.
pub fn parse_returns<R: Read>(reader: R, source: impl Into<PathBuf>) -> Result<ReturnsTable> {
    let source = source.into();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::ingestion(&source, 1, e.to_string()))?
        .clone();
    if headers.len() < 2 || &headers[0] != "date" {
        return Err(Error::ingestion(&source, 1, "expected header `date,<ticker>,...`"));
    }
    let tickers: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    for (i, t) in tickers.iter().enumerate() {
        if t.is_empty() {
            return Err(Error::ingestion(&source, 1, format!("empty ticker in column {}", i + 2)));
        }
        if tickers[..i].contains(t) {
            return Err(Error::ingestion(&source, 1, format!("duplicate ticker '{t}'")));
        }
    }
    let mut periods = Vec::new();
    let mut returns = vec![Vec::new(); tickers.len()];
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::ingestion(&source, row, e.to_string()))?;
        let date = &record[0];
        if !is_iso_date(date) {
            return Err(Error::ingestion(&source, row, format!("'{date}' is not an ISO date")));
        }
        periods.push(date.to_string());
        for (k, cell) in record.iter().skip(1).enumerate() {
            let value = if cell.is_empty() {
                None
            } else {
                let v: f64 = cell.parse().map_err(|_| {
                    Error::ingestion(&source, row, format!("{}: '{cell}' is not a number", tickers[k]))
                })?;
                if !v.is_finite() || v <= -1.0 {
                    return Err(Error::ingestion(
                        &source,
                        row,
                        format!("{}: return {v} must be finite and greater than -1", tickers[k]),
                    ));
                }
                Some(v)
            };
            returns[k].push(value);
        }
    }
    let mut table = ReturnsTable {
        tickers: Vec::new(),
        periods,
        returns: Vec::new(),
        dropped: Vec::new(),
    };
    for (ticker, series) in tickers.into_iter().zip(returns) {
        let n = series.iter().flatten().count();
        if n < MIN_OBSERVATIONS {
            log::info!("dropping {ticker}: {n} observations (< {MIN_OBSERVATIONS})");
            table.dropped.push((ticker, n));
        } else {
            table.tickers.push(ticker);
            table.returns.push(series);
        }
    }
    log::info!(
        "{}: {} periods, {} tickers kept, {} dropped",
        source.display(),
        table.periods.len(),
        table.tickers.len(),
        table.dropped.len()
    );
    Ok(table)
}

pub fn load_returns(path: impl AsRef<Path>) -> Result<ReturnsTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::ingestion(path, 0, e.to_string()))?;
    parse_returns(std::io::BufReader::new(file), path)
}

/// Equal-weighted averages of per-stock moments within one decile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecileStats {
    pub decile: usize,
    pub n_stocks: usize,
    pub mean: f64,
    pub std: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Tickers grouped by ascending sample skewness.
#[derive(Debug, Clone, PartialEq)]
pub struct DecileAssignment {
    /// Table indices of the members of each decile, in sort order.
    pub members: Vec<Vec<usize>>,
    /// Per ticker (table order): moments of the full observed series.
    pub moments: Vec<MomentSummary>,
    pub stats: Vec<DecileStats>,
}

impl DecileAssignment {
    pub fn n_deciles(&self) -> usize {
        self.members.len()
    }

    /// 1-based decile of a table index.
    pub fn decile_of(&self, t: usize) -> Option<usize> {
        self.members.iter().position(|m| m.contains(&t)).map(|d| d + 1)
    }
}

/// Sorts tickers by sample skewness (ties by ticker identifier) and cuts the
/// order into `d` contiguous blocks whose sizes differ by at most one.
pub fn build_deciles(table: &ReturnsTable, d: usize) -> Result<DecileAssignment> {
    if d < 2 {
        return Err(Error::Usage(format!("need at least 2 deciles, got {d}")));
    }
    let n = table.tickers.len();
    if n < d {
        return Err(Error::Usage(format!("{d} deciles requested but only {n} tickers retained")));
    }
    let moments: Vec<MomentSummary> = (0..n).map(|t| moments_of(&table.observed(t))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        moments[a]
            .skewness
            .total_cmp(&moments[b].skewness)
            .then_with(|| table.tickers[a].cmp(&table.tickers[b]))
    });
    let members: Vec<Vec<usize>> = (0..d).map(|k| order[k * n / d..(k + 1) * n / d].to_vec()).collect();
    let stats = members
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let avg = |f: fn(&MomentSummary) -> f64| m.iter().map(|&t| f(&moments[t])).sum::<f64>() / m.len() as f64;
            DecileStats {
                decile: k + 1,
                n_stocks: m.len(),
                mean: avg(|s| s.mean),
                std: avg(|s| s.std),
                skewness: avg(|s| s.skewness),
                kurtosis: avg(|s| s.kurtosis),
            }
        })
        .collect();
    Ok(DecileAssignment { members, moments, stats })
}

/// Agreement between the mean-variance rule and expected utility for pairs
/// (decile-1 stock, decile-k stock).
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementRow {
    pub decile: usize,
    /// Pairs where the decile-1 stock strictly wins under the mean-variance rule.
    pub n_pairs: usize,
    /// Per utility: qualifying pairs evaluated (pairs whose draws fall outside
    /// a utility's domain are left out of that utility's cell).
    pub evaluated: Vec<usize>,
    pub agreeing: Vec<usize>,
}

impl AgreementRow {
    /// Percentage per utility; `None` when the cell has no pairs.
    pub fn pct(&self, u: usize) -> Option<f64> {
        (self.evaluated[u] > 0).then(|| 100.0 * self.agreeing[u] as f64 / self.evaluated[u] as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementTable {
    pub utilities: Vec<UtilitySpec>,
    pub rows: Vec<AgreementRow>,
}

fn pair_agreement(table: &ReturnsTable, a: usize, b: usize, utilities: &[UtilitySpec]) -> Option<Vec<Option<bool>>> {
    let (x, y) = table.overlap(a, b);
    if x.len() < MIN_OBSERVATIONS {
        return None;
    }
    if !mvc_test(&moments_of(&x), &moments_of(&y)).first_dominates() {
        return None;
    }
    Some(
        utilities
            .iter()
            .map(|u| match (sample_expected_utility(&x, u), sample_expected_utility(&y, u)) {
                (Ok(ex), Ok(ey)) => Some(ex.value >= ey.value),
                _ => None,
            })
            .collect(),
    )
}

/// For each decile `k`, every ordered pair (stock of decile 1, stock of decile
/// `k`) compared over their overlapping history.
pub fn cross_decile_analysis(
    assignment: &DecileAssignment,
    table: &ReturnsTable,
    utilities: &[UtilitySpec],
) -> Result<AgreementTable> {
    if assignment.moments.len() != table.tickers.len() {
        return Err(Error::InvalidParameter(
            "decile assignment does not belong to this table".into(),
        ));
    }
    let first = &assignment.members[0];
    let rows = assignment
        .members
        .iter()
        .enumerate()
        .map(|(k, members)| {
            let pairs: Vec<(usize, usize)> = first
                .iter()
                .flat_map(|&a| members.iter().filter(move |&&b| b != a).map(move |&b| (a, b)))
                .collect();
            let results: Vec<Option<Vec<Option<bool>>>> = pairs
                .par_iter()
                .map(|&(a, b)| pair_agreement(table, a, b, utilities))
                .collect();
            let mut row = AgreementRow {
                decile: k + 1,
                n_pairs: 0,
                evaluated: vec![0; utilities.len()],
                agreeing: vec![0; utilities.len()],
            };
            for r in results.into_iter().flatten() {
                row.n_pairs += 1;
                for (u, v) in r.into_iter().enumerate() {
                    if let Some(agree) = v {
                        row.evaluated[u] += 1;
                        row.agreeing[u] += usize::from(agree);
                    }
                }
            }
            row
        })
        .collect();
    Ok(AgreementTable {
        utilities: utilities.to_vec(),
        rows,
    })
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn stats_grid(stats: &[DecileStats]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["statistic".to_string()];
    header.extend(stats.iter().map(|s| format!("Dec {}", s.decile)));
    let fields: [(&str, fn(&DecileStats) -> String); 5] = [
        ("Stocks", |s| s.n_stocks.to_string()),
        ("Mean", |s| format!("{:.4}", s.mean)),
        ("Std", |s| format!("{:.4}", s.std)),
        ("Skewness", |s| format!("{:.4}", s.skewness)),
        ("Kurtosis", |s| format!("{:.4}", s.kurtosis)),
    ];
    let rows = fields
        .iter()
        .map(|(name, f)| std::iter::once(name.to_string()).chain(stats.iter().map(f)).collect())
        .collect();
    (header, rows)
}

fn agreement_grid(t: &AgreementTable) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["pair".to_string(), "n_pairs".to_string()];
    header.extend(t.utilities.iter().map(UtilitySpec::id));
    let rows = t
        .rows
        .iter()
        .map(|r| {
            let mut cells = vec![format!("Dec 1 vs Dec {}", r.decile), r.n_pairs.to_string()];
            cells.extend((0..t.utilities.len()).map(|u| r.pct(u).map(|p| format!("{p:.2}")).unwrap_or_default()));
            cells
        })
        .collect();
    (header, rows)
}

fn write_grid_csv<W: Write>((header, rows): (Vec<String>, Vec<Vec<String>>), out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header).map_err(csv_io)?;
    for r in rows {
        w.write_record(&r).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn write_grid_md<W: Write>((header, rows): (Vec<String>, Vec<Vec<String>>), mut out: W) -> Result<()> {
    markdown_table(&header, &rows, &mut out)
}

pub fn write_decile_stats_csv<W: Write>(assignment: &DecileAssignment, out: W) -> Result<()> {
    write_grid_csv(stats_grid(&assignment.stats), out)
}

pub fn write_decile_stats_markdown<W: Write>(assignment: &DecileAssignment, out: W) -> Result<()> {
    write_grid_md(stats_grid(&assignment.stats), out)
}

/// Rows `Dec 1 vs Dec k`, one column per utility; empty cells mark deciles
/// without qualifying pairs.
pub fn write_agreement_csv<W: Write>(table: &AgreementTable, out: W) -> Result<()> {
    write_grid_csv(agreement_grid(table), out)
}

pub fn write_agreement_markdown<W: Write>(table: &AgreementTable, out: W) -> Result<()> {
    write_grid_md(agreement_grid(table), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::standard_panel;

    fn panel_csv(series: &[(&str, Vec<Option<f64>>)]) -> String {
        let n = series[0].1.len();
        let mut s = String::from("date");
        for (t, _) in series {
            s.push(',');
            s.push_str(t);
        }
        s.push('\n');
        for p in 0..n {
            s.push_str(&format!("{:04}-{:02}-01", 2000 + p / 12, p % 12 + 1));
            for (_, v) in series {
                s.push(',');
                if let Some(x) = v[p] {
                    s.push_str(&x.to_string());
                }
            }
            s.push('\n');
        }
        s
    }

    fn wave(n: usize, shift: f64, amp: f64) -> Vec<Option<f64>> {
        (0..n).map(|i| Some(shift + amp * ((i as f64) * 0.9 + shift * 100.0).sin())).collect()
    }

    #[test]
    fn parses_and_drops_short_tickers() {
        let mut short = wave(30, 0.01, 0.05);
        for v in short.iter_mut().skip(10) {
            *v = None;
        }
        let text = panel_csv(&[("AAA", wave(30, 0.01, 0.05)), ("BBB", short), ("CCC", wave(30, 0.0, 0.02))]);
        let table = parse_returns(text.as_bytes(), "mem").unwrap();
        assert_eq!(table.tickers, vec!["AAA", "CCC"]);
        assert_eq!(table.dropped, vec![("BBB".to_string(), 10)]);
        assert_eq!(table.periods.len(), 30);
    }

    #[test]
    fn rejects_bad_returns_with_row() {
        let text = "date,A\n2000-01-01,0.1\n2000-02-01,-1.5\n";
        match parse_returns(text.as_bytes(), "mem") {
            Err(Error::Ingestion { row, .. }) => assert_eq!(row, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_returns("date,A,A\n".as_bytes(), "mem").is_err());
        assert!(parse_returns("date,A\n2000-13-01,0.1\n".as_bytes(), "mem").is_err());
        assert!(parse_returns("date,A\n2000-01-01,x\n".as_bytes(), "mem").is_err());
    }

    fn skewed(n: usize, skew_sign: f64, seed: usize) -> Vec<Option<f64>> {
        (0..n)
            .map(|i| {
                let u = (((i * 7919 + seed * 104_729) % 1000) as f64 + 0.5) / 1000.0;
                // exponential-shaped shocks, mirrored for negative skew
                Some(0.01 + skew_sign * 0.03 * (-(u.ln()) - 1.0))
            })
            .collect()
    }

    #[test]
    fn deciles_sort_by_skewness_with_ticker_tiebreak() {
        let names = ["J", "I", "H", "G", "F", "E", "D", "C", "B", "A"];
        let series: Vec<(&str, Vec<Option<f64>>)> = names
            .iter()
            .enumerate()
            .map(|(k, n)| (*n, if k < 5 { skewed(60, -1.0, k) } else { skewed(60, 1.0, k) }))
            .collect();
        let table = parse_returns(panel_csv(&series).as_bytes(), "mem").unwrap();
        let a = build_deciles(&table, 2).unwrap();
        assert_eq!(a.members[0].len(), 5);
        for &t in &a.members[0] {
            assert!(a.moments[t].skewness < 0.0);
        }
        assert!(a.stats[0].skewness < a.stats[1].skewness);

        // identical series: pure ticker order
        let same: Vec<(&str, Vec<Option<f64>>)> = names.iter().map(|n| (*n, skewed(40, 1.0, 1))).collect();
        let table = parse_returns(panel_csv(&same).as_bytes(), "mem").unwrap();
        let a = build_deciles(&table, 10).unwrap();
        let order: Vec<&str> = a.members.iter().map(|m| table.tickers[m[0]].as_str()).collect();
        assert_eq!(order, vec!["A", "B", "C", "D", "E", "F", "G", "H", "I", "J"]);
        assert!(build_deciles(&table, 11).is_err());
        assert!(build_deciles(&table, 1).is_err());
    }

    #[test]
    fn identical_series_never_qualify() {
        let s = wave(40, 0.01, 0.04);
        let table = parse_returns(panel_csv(&[("A", s.clone()), ("B", s)]).as_bytes(), "mem").unwrap();
        let a = build_deciles(&table, 2).unwrap();
        let t = cross_decile_analysis(&a, &table, &standard_panel()).unwrap();
        assert!(t.rows.iter().all(|r| r.n_pairs == 0));
        assert!(t.rows.iter().all(|r| r.pct(0).is_none()));
    }

    #[test]
    fn block_sizes_differ_by_at_most_one() {
        let series: Vec<(String, Vec<Option<f64>>)> =
            (0..23).map(|k| (format!("T{k:02}"), skewed(30, if k % 2 == 0 { 1.0 } else { -1.0 }, k))).collect();
        let refs: Vec<(&str, Vec<Option<f64>>)> = series.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
        let table = parse_returns(panel_csv(&refs).as_bytes(), "mem").unwrap();
        let a = build_deciles(&table, 10).unwrap();
        let sizes: Vec<usize> = a.members.iter().map(Vec::len).collect();
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        assert!(hi - lo <= 1);
        let mut all: Vec<usize> = a.members.concat();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
    }
}
