//! Relations of non-negative integer tuples, range queries over them, and the
//! linear scan that every index result is checked against.
//!
//! Attribute values are dense ordinal codes starting at 0. A relation never
//! holds two tuples that agree in every dimension; tuple IDs are the 0-based
//! row positions.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tuple identifier: the 0-based row position inside its relation.
pub type Tid = u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    dims: usize,
    values: Vec<u64>,
    cardinalities: Vec<usize>,
}

impl Relation {
    /// Builds a relation from rows, rejecting ragged rows and duplicate tuples.
    pub fn new<R: AsRef<[u64]>>(dims: usize, rows: &[R]) -> Result<Self> {
        if dims == 0 {
            return Err(Error::NoDimensions);
        }
        let mut values = Vec::with_capacity(rows.len() * dims);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dims {
                return Err(Error::RowWidth {
                    row: i,
                    expected: dims,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(dims, values)
    }

    /// Builds a relation from a row-major value buffer.
    pub fn from_flat(dims: usize, values: Vec<u64>) -> Result<Self> {
        if dims == 0 {
            return Err(Error::NoDimensions);
        }
        if !values.len().is_multiple_of(dims) {
            return Err(Error::RowWidth {
                row: values.len() / dims,
                expected: dims,
                found: values.len() % dims,
            });
        }
        let mut rel = Relation {
            dims,
            values,
            cardinalities: Vec::new(),
        };
        if let Some((first, second)) = rel.find_duplicate() {
            return Err(Error::DuplicateTuple { first, second });
        }
        rel.cardinalities = (0..dims)
            .map(|d| {
                rel.rows()
                    .map(|r| r[d])
                    .collect::<HashSet<_>>()
                    .len()
            })
            .collect();
        Ok(rel)
    }

    /// Row indices in lexicographic order of their tuples; ties keep row order.
    pub fn sorted_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.row(a).cmp(self.row(b)));
        order
    }

    fn find_duplicate(&self) -> Option<(usize, usize)> {
        let order = self.sorted_order();
        order.windows(2).find_map(|w| {
            (self.row(w[0]) == self.row(w[1])).then(|| (w[0].min(w[1]), w[0].max(w[1])))
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, tid: usize) -> &[u64] {
        &self.values[tid * self.dims..(tid + 1) * self.dims]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u64]> + '_ {
        self.values.chunks_exact(self.dims)
    }

    pub fn column(&self, dim: usize) -> impl Iterator<Item = u64> + '_ {
        self.rows().map(move |r| r[dim])
    }

    /// Observed distinct-value count per column.
    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    /// Largest value per column, or `None` for an empty relation.
    pub fn column_max(&self) -> Option<Vec<u64>> {
        if self.is_empty() {
            return None;
        }
        Some(
            (0..self.dims)
                .map(|d| self.column(d).max().unwrap_or(0))
                .collect(),
        )
    }

    /// Sub-relation of the rows accepted by `keep`. TIDs are renumbered.
    pub fn filter_rows(&self, mut keep: impl FnMut(&[u64]) -> bool) -> Result<Relation> {
        let values = self
            .rows()
            .filter(|r| keep(r))
            .flat_map(|r| r.iter().copied())
            .collect();
        Relation::from_flat(self.dims, values)
    }

    pub fn meta(&self) -> RelationMeta {
        RelationMeta {
            k: self.dims,
            rows: self.len(),
            cardinalities: self.cardinalities.clone(),
        }
    }

    /// Writes one headerless CSV line per tuple.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(writer);
        for row in self.rows() {
            out.write_record(row.iter().map(|v| v.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Relation> {
        let mut input = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut dims = None;
        let mut values = Vec::new();
        for (i, record) in input.records().enumerate() {
            let record = record?;
            let width = *dims.get_or_insert(record.len());
            if record.len() != width {
                return Err(Error::RowWidth {
                    row: i,
                    expected: width,
                    found: record.len(),
                });
            }
            for field in record.iter() {
                let v = field.parse::<u64>().map_err(|e| {
                    Error::Format(format!("line {}: {field:?} is not a value: {e}", i + 1))
                })?;
                values.push(v);
            }
        }
        match dims {
            Some(d) => Relation::from_flat(d, values),
            None => Err(Error::EmptyRelation),
        }
    }

    /// Writes `<path>` as CSV and `<path>.json` as the metadata sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(path)?))?;
        let meta = serde_json::to_string_pretty(&self.meta())?;
        std::fs::write(sidecar_path(path), meta)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Relation> {
        Relation::read_csv(BufReader::new(File::open(path)?))
    }
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".json");
    name.into()
}

/// Sidecar metadata written next to a relation CSV.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationMeta {
    pub k: usize,
    pub rows: usize,
    pub cardinalities: Vec<usize>,
}

/// Inclusive integer interval `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lower: u64,
    pub upper: u64,
}

impl Window {
    pub fn new(lower: u64, upper: u64) -> Result<Self> {
        if lower > upper {
            return Err(Error::DegenerateWindow {
                dim: 0,
                lower: lower.into(),
                upper: upper.into(),
            });
        }
        Ok(Window { lower, upper })
    }

    #[inline]
    pub fn contains(&self, v: u64) -> bool {
        self.lower <= v && v <= self.upper
    }

    pub fn width(&self) -> u64 {
        self.upper - self.lower + 1
    }
}

/// A conjunction of per-dimension inclusive windows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Window>", into = "Vec<Window>")]
pub struct RangeQuery {
    windows: Vec<Window>,
}

impl RangeQuery {
    pub fn new(windows: Vec<Window>) -> Result<Self> {
        for (dim, w) in windows.iter().enumerate() {
            if w.lower > w.upper {
                return Err(Error::DegenerateWindow {
                    dim,
                    lower: w.lower.into(),
                    upper: w.upper.into(),
                });
            }
        }
        Ok(RangeQuery { windows })
    }

    pub fn from_bounds(bounds: &[(u64, u64)]) -> Result<Self> {
        RangeQuery::new(
            bounds
                .iter()
                .map(|&(lower, upper)| Window { lower, upper })
                .collect(),
        )
    }

    /// Query selecting the whole domain `[0, max]` in every dimension.
    pub fn full(domain_max: &[u64]) -> Self {
        RangeQuery {
            windows: domain_max.iter().map(|&m| Window { lower: 0, upper: m }).collect(),
        }
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn dims(&self) -> usize {
        self.windows.len()
    }

    #[inline]
    pub fn matches(&self, row: &[u64]) -> bool {
        self.windows.iter().zip(row).all(|(w, &v)| w.contains(v))
    }

    fn check_dims(&self, dims: usize) -> Result<()> {
        if self.windows.len() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                found: self.windows.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn expect_dims(&self, dims: usize) -> Result<()> {
        self.check_dims(dims)
    }
}

impl TryFrom<Vec<Window>> for RangeQuery {
    type Error = Error;

    fn try_from(windows: Vec<Window>) -> Result<Self> {
        RangeQuery::new(windows)
    }
}

impl From<RangeQuery> for Vec<Window> {
    fn from(q: RangeQuery) -> Self {
        q.windows
    }
}

/// A single-attribute SQL-style predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Predicate {
    Eq(u64),
    Lt(u64),
    Le(u64),
    Gt(u64),
    Ge(u64),
    Between(u64, u64),
    Any,
}

impl Predicate {
    /// Maps the predicate onto an inclusive window over `[0, domain_max]`.
    pub fn window(self, domain_max: u64) -> std::result::Result<Window, (i128, i128)> {
        let (lower, upper): (i128, i128) = match self {
            Predicate::Eq(c) => (c.into(), c.into()),
            Predicate::Lt(c) => (0, i128::from(c) - 1),
            Predicate::Le(c) => (0, c.into()),
            Predicate::Gt(c) => (i128::from(c) + 1, domain_max.into()),
            Predicate::Ge(c) => (c.into(), domain_max.into()),
            Predicate::Between(a, b) => (a.into(), b.into()),
            Predicate::Any => (0, domain_max.into()),
        };
        if lower > upper {
            return Err((lower, upper));
        }
        Ok(Window {
            lower: lower as u64,
            upper: upper as u64,
        })
    }
}

pub fn query_from_predicates(preds: &[Predicate], domain_max: &[u64]) -> Result<RangeQuery> {
    if preds.len() != domain_max.len() {
        return Err(Error::DimensionMismatch {
            expected: domain_max.len(),
            found: preds.len(),
        });
    }
    let windows = preds
        .iter()
        .zip(domain_max)
        .enumerate()
        .map(|(dim, (p, &max))| {
            p.window(max)
                .map_err(|(lower, upper)| Error::DegenerateWindow { dim, lower, upper })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RangeQuery { windows })
}

/// Sequential scan returning the sorted TIDs of all matching tuples.
pub fn linear_scan(rel: &Relation, query: &RangeQuery) -> Result<Vec<Tid>> {
    query.check_dims(rel.dims())?;
    Ok(rel
        .rows()
        .enumerate()
        .filter(|(_, row)| query.matches(row))
        .map(|(tid, _)| tid as Tid)
        .collect())
}

/// Measured partial and total selectivities of a query on a relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectivityVector {
    pub partial: Vec<f64>,
    pub total: f64,
}

pub fn measure_selectivities(rel: &Relation, query: &RangeQuery) -> Result<SelectivityVector> {
    query.check_dims(rel.dims())?;
    if rel.is_empty() {
        return Err(Error::EmptyRelation);
    }
    let mut hits = vec![0usize; rel.dims()];
    let mut total = 0usize;
    for row in rel.rows() {
        let mut all = true;
        for ((w, &v), h) in query.windows().iter().zip(row).zip(hits.iter_mut()) {
            if w.contains(v) {
                *h += 1;
            } else {
                all = false;
            }
        }
        total += usize::from(all);
    }
    let n = rel.len() as f64;
    Ok(SelectivityVector {
        partial: hits.into_iter().map(|h| h as f64 / n).collect(),
        total: total as f64 / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_rows() -> Relation {
        Relation::new(2, &[[1, 1], [2, 3]]).unwrap()
    }

    #[test]
    fn predicate_windows() {
        let max = [10];
        let win = |p| query_from_predicates(&[p], &max).map(|q| q.windows()[0]);
        assert_eq!(win(Predicate::Eq(5)).unwrap(), Window { lower: 5, upper: 5 });
        assert_eq!(win(Predicate::Lt(4)).unwrap(), Window { lower: 0, upper: 3 });
        assert_eq!(win(Predicate::Le(4)).unwrap(), Window { lower: 0, upper: 4 });
        assert_eq!(win(Predicate::Gt(4)).unwrap(), Window { lower: 5, upper: 10 });
        assert_eq!(win(Predicate::Ge(4)).unwrap(), Window { lower: 4, upper: 10 });
        assert_eq!(
            win(Predicate::Between(2, 7)).unwrap(),
            Window { lower: 2, upper: 7 }
        );
        assert_eq!(win(Predicate::Any).unwrap(), Window { lower: 0, upper: 10 });
    }

    #[test]
    fn degenerate_predicates() {
        for p in [Predicate::Lt(0), Predicate::Gt(10), Predicate::Between(5, 4)] {
            assert!(matches!(
                query_from_predicates(&[p], &[10]),
                Err(Error::DegenerateWindow { .. })
            ));
        }
        assert!(matches!(
            query_from_predicates(&[Predicate::Any], &[10, 10]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inverted_window_is_rejected() {
        assert!(RangeQuery::from_bounds(&[(3, 2)]).is_err());
        assert!(serde_json::from_str::<RangeQuery>(r#"[{"lower":3,"upper":2}]"#).is_err());
    }

    #[test]
    fn relation_invariants() {
        assert!(matches!(
            Relation::new(2, &[vec![1, 2], vec![3]]),
            Err(Error::RowWidth { row: 1, .. })
        ));
        assert!(matches!(
            Relation::new(2, &[[1, 2], [0, 0], [1, 2]]),
            Err(Error::DuplicateTuple { first: 0, second: 2 })
        ));
        let rel = Relation::new(3, &[[1, 2, 3], [1, 5, 3], [2, 2, 3]]).unwrap();
        assert_eq!(rel.cardinalities(), &[2, 2, 1]);
    }

    #[test]
    fn scan_examples() {
        let rel = two_rows();
        let all = RangeQuery::from_bounds(&[(0, 5), (0, 5)]).unwrap();
        assert_eq!(linear_scan(&rel, &all).unwrap(), vec![0, 1]);
        let none = RangeQuery::from_bounds(&[(2, 2), (0, 1)]).unwrap();
        assert!(linear_scan(&rel, &none).unwrap().is_empty());
        let short = RangeQuery::from_bounds(&[(0, 5)]).unwrap();
        assert!(matches!(
            linear_scan(&rel, &short),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn selectivity_examples() {
        let rel = two_rows();
        let full = RangeQuery::full(&[5, 5]);
        let s = measure_selectivities(&rel, &full).unwrap();
        assert_eq!(s.partial, vec![1.0, 1.0]);
        assert_eq!(s.total, 1.0);

        let q = RangeQuery::from_bounds(&[(0, 5), (4, 5)]).unwrap();
        let s = measure_selectivities(&rel, &q).unwrap();
        assert_eq!(s.partial, vec![1.0, 0.0]);
        assert_eq!(s.total, 0.0);
    }

    #[test]
    fn half_domain_selectivity() {
        // Every value of a 100-value domain appears 10 times.
        let rows: Vec<[u64; 2]> = (0..1000).map(|i| [i % 100, i]).collect();
        let rel = Relation::new(2, &rows).unwrap();
        let q = RangeQuery::from_bounds(&[(0, 49), (0, 999)]).unwrap();
        let s = measure_selectivities(&rel, &q).unwrap();
        assert_eq!(s.partial[0], 0.5);
    }

    #[test]
    fn csv_round_trip() {
        let rel = Relation::new(3, &[[1, 2, 3], [4, 5, 6]]).unwrap();
        let mut buf = Vec::new();
        rel.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "1,2,3\n4,5,6\n");
        assert_eq!(Relation::read_csv(&buf[..]).unwrap(), rel);
        assert!(matches!(
            Relation::read_csv(&b""[..]),
            Err(Error::EmptyRelation)
        ));
    }

    fn arb_relation() -> impl Strategy<Value = Relation> {
        (1usize..5).prop_flat_map(|k| {
            prop::collection::hash_set(prop::collection::vec(0u64..8, k), 1..60)
                .prop_map(move |rows| Relation::new(k, &rows.into_iter().collect::<Vec<_>>()).unwrap())
        })
    }

    fn arb_query(k: usize) -> impl Strategy<Value = RangeQuery> {
        prop::collection::vec((0u64..9, 0u64..9), k).prop_map(|b| {
            let b: Vec<_> = b.into_iter().map(|(x, y)| (x.min(y), x.max(y))).collect();
            RangeQuery::from_bounds(&b).unwrap()
        })
    }

    proptest! {
        #[test]
        fn total_bounded_by_partials(
            (rel, q) in arb_relation().prop_flat_map(|r| { let k = r.dims(); (Just(r), arb_query(k)) })
        ) {
            let s = measure_selectivities(&rel, &q).unwrap();
            let min = s.partial.iter().cloned().fold(1.0, f64::min);
            prop_assert!(s.total <= min);
            prop_assert!(s.partial.iter().all(|p| (0.0..=1.0).contains(p)));
        }

        #[test]
        fn scan_is_row_order_independent(
            (rel, q, seed) in arb_relation().prop_flat_map(|r| {
                let k = r.dims();
                (Just(r), arb_query(k), any::<u64>())
            })
        ) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut perm: Vec<usize> = (0..rel.len()).collect();
            perm.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
            let rows: Vec<&[u64]> = perm.iter().map(|&i| rel.row(i)).collect();
            let shuffled = Relation::new(rel.dims(), &rows).unwrap();
            let mut back: Vec<u64> = linear_scan(&shuffled, &q).unwrap()
                .into_iter().map(|t| perm[t as usize] as u64).collect();
            back.sort_unstable();
            prop_assert_eq!(back, linear_scan(&rel, &q).unwrap());
        }
    }
}
