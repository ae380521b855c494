//! In-memory tuple store ordered by z-value.
//!
//! Tuples are signed application values keyed by `(z, pk)` in a B-tree, so
//! each refined subrange maps to one ordered range scan. A query region is
//! derived from per-dimension conditions, refined according to the query
//! mode, scanned per subrange, and post-filtered with the exact original
//! predicate; approximation can only add scanned tuples, never answers.
//! After build the store is read-only and safe to query concurrently.

use std::collections::btree_map::BTreeMap;
use std::collections::HashMap;
use std::io::{Read, Write};
use std::time::Instant;

use crate::approx::{approximate, ApproxParams};
use crate::error::Error;
use crate::refine::{refine_jump, RefineCounters};
use crate::region::{Condition, QueryRegion, ValueDomain, ZRange};
use crate::zspace::{SpaceConfig, ZValue};

/// How a query locates candidate tuples.
#[derive(Debug, Clone, PartialEq)]
pub enum QueryMode {
    /// Scan the region's whole bracketing z-range as one subrange.
    Raw,
    /// Refine the bracket into exact in-region runs.
    Exact,
    /// Widen the region first, then refine against the widened region
    /// within the original bracket: coarser, fewer subranges.
    Approx(ApproxParams),
}

/// Work and timing report of one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub scanned: u64,
    pub matched: u64,
    pub subranges: u64,
    pub refine_us: u64,
    pub scan_us: u64,
    pub counters: RefineCounters,
}

/// Ordered tuple store over a fixed config and value domain.
#[derive(Debug, Clone)]
pub struct TupleStore {
    cfg: SpaceConfig,
    domain: ValueDomain,
    map: BTreeMap<(ZValue, u64), Vec<i64>>,
}

impl TupleStore {
    /// Builds a store from `(pk, values)` rows. Rows are validated against
    /// the domain; a duplicate pk replaces its earlier row (the store keeps
    /// one tuple per pk).
    pub fn build<I>(rows: I, cfg: SpaceConfig, domain: ValueDomain) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (u64, Vec<i64>)>,
    {
        if cfg.bits() != domain.bits() {
            return Err(Error::Dataset(format!(
                "config uses {} bits per dimension but the domain has {}",
                cfg.bits(),
                domain.bits()
            )));
        }
        let mut map = BTreeMap::new();
        let mut by_pk: HashMap<u64, ZValue> = HashMap::new();
        let dims = cfg.dims() as usize;
        let mut grid = vec![0u128; dims];
        for (pk, values) in rows {
            if values.len() != dims {
                return Err(Error::DimensionMismatch { expected: dims, actual: values.len() });
            }
            for (column, &v) in values.iter().enumerate() {
                grid[column] = domain.grid(v).ok_or(Error::ValueOutsideDomain {
                    pk,
                    column,
                    value: v,
                    lo: domain.min_value(),
                    hi: domain.max_value(),
                })?;
            }
            let z = cfg.encode(&grid).expect("grid coordinates fit the config");
            if let Some(old_z) = by_pk.insert(pk, z) {
                map.remove(&(old_z, pk));
            }
            map.insert((z, pk), values);
        }
        Ok(TupleStore { cfg, domain, map })
    }

    pub fn config(&self) -> SpaceConfig {
        self.cfg
    }

    pub fn domain(&self) -> ValueDomain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Tuples in `(z, pk)` order.
    pub fn iter(&self) -> impl Iterator<Item = (ZValue, u64, &[i64])> {
        self.map.iter().map(|(&(z, pk), values)| (z, pk, values.as_slice()))
    }

    fn region_for(&self, conditions: &[Condition]) -> Result<Option<QueryRegion>, Error> {
        if conditions.len() != self.cfg.dims() as usize {
            return Err(Error::DimensionMismatch {
                expected: self.cfg.dims() as usize,
                actual: conditions.len(),
            });
        }
        QueryRegion::from_values(&self.domain, conditions)
    }

    /// Runs a region query and returns matching pks in `(z, pk)` order plus
    /// the work report. Conditions that miss the domain yield an empty
    /// result with zeroed stats.
    pub fn execute_query(
        &self,
        conditions: &[Condition],
        mode: &QueryMode,
    ) -> Result<(Vec<u64>, QueryStats), Error> {
        let refine_start = Instant::now();
        let Some(region) = self.region_for(conditions)? else {
            return Ok((Vec::new(), QueryStats::default()));
        };
        let bracket = region.to_z_range();
        let (ranges, counters) = match mode {
            QueryMode::Raw => (vec![bracket], RefineCounters::default()),
            QueryMode::Exact => {
                let out = refine_jump(bracket, &region);
                (out.ranges, out.counters)
            }
            QueryMode::Approx(params) => {
                let widened = approximate(&region, params);
                let out = refine_jump(bracket, &widened);
                (out.ranges, out.counters)
            }
        };
        let refine_us = refine_start.elapsed().as_micros() as u64;

        let scan_start = Instant::now();
        let (pks, scanned) = self.scan_ranges(&region, &ranges);
        let scan_us = scan_start.elapsed().as_micros() as u64;

        let stats = QueryStats {
            scanned,
            matched: pks.len() as u64,
            subranges: ranges.len() as u64,
            refine_us,
            scan_us,
            counters,
        };
        Ok((pks, stats))
    }

    /// Scans the given subranges in order, post-filtering every touched
    /// tuple with the region predicate (the region must belong to the
    /// store's config). Returns matching pks and the number of tuples
    /// touched; this is the scan half of [`TupleStore::execute_query`],
    /// exposed so callers can pair it with their own refinement.
    pub fn scan_ranges(&self, region: &QueryRegion, ranges: &[ZRange]) -> (Vec<u64>, u64) {
        let mut pks = Vec::new();
        let mut scanned = 0u64;
        for range in ranges {
            for (&(z, pk), _) in self.map.range((range.start, 0)..=(range.end, u64::MAX)) {
                scanned += 1;
                if region.contains_z(z) {
                    pks.push(pk);
                }
            }
        }
        (pks, scanned)
    }

    /// Reference execution: filters every tuple with the exact predicate,
    /// in `(z, pk)` order.
    pub fn full_scan(&self, conditions: &[Condition]) -> Result<Vec<u64>, Error> {
        let Some(region) = self.region_for(conditions)? else {
            return Ok(Vec::new());
        };
        Ok(self
            .map
            .keys()
            .filter(|&&(z, _)| region.contains_z(z))
            .map(|&(_, pk)| pk)
            .collect())
    }

    /// Reads a `pk,s1,...,sm` CSV; the dimension count comes from the
    /// header, z-values are computed on load.
    pub fn load_csv<R: Read>(reader: R, domain: ValueDomain) -> Result<Self, Error> {
        let mut csv = csv::Reader::from_reader(reader);
        let header = csv.headers()?.clone();
        if header.len() < 2 || header.get(0) != Some("pk") {
            return Err(Error::Dataset(format!(
                "expected header pk,s1,...,sm, got `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let dims = (header.len() - 1) as u32;
        let cfg = SpaceConfig::new(dims, domain.bits())?;
        let mut rows = Vec::new();
        for (idx, record) in csv.records().enumerate() {
            let record = record?;
            let line = idx + 2;
            if record.len() != header.len() {
                return Err(Error::Dataset(format!(
                    "line {line}: expected {} fields, got {}",
                    header.len(),
                    record.len()
                )));
            }
            let pk: u64 = record[0]
                .trim()
                .parse()
                .map_err(|_| Error::Dataset(format!("line {line}: bad pk `{}`", &record[0])))?;
            let mut values = Vec::with_capacity(dims as usize);
            for field in record.iter().skip(1) {
                let v: i64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Dataset(format!("line {line}: bad value `{field}`")))?;
                values.push(v);
            }
            rows.push((pk, values));
        }
        TupleStore::build(rows, cfg, domain)
    }

    /// Writes the `pk,s1,...,sm` CSV in `(z, pk)` order.
    pub fn save_csv<W: Write>(&self, writer: W) -> Result<(), Error> {
        let mut csv = csv::Writer::from_writer(writer);
        let mut header = vec!["pk".to_string()];
        header.extend((1..=self.cfg.dims()).map(|d| format!("s{d}")));
        csv.write_record(&header)?;
        for (_, pk, values) in self.iter() {
            let mut record = vec![pk.to_string()];
            record.extend(values.iter().map(|v| v.to_string()));
            csv.write_record(&record)?;
        }
        csv.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_store() -> TupleStore {
        // One tuple per cell of the 8x8 grid, pk = z for readability.
        let cfg = SpaceConfig::new(2, 3).unwrap();
        let domain = ValueDomain::new(0, 3).unwrap();
        let rows = (0..64u128).map(|z| {
            let coords = cfg.decode(z).unwrap();
            (z as u64, coords.iter().map(|&c| c as i64).collect())
        });
        TupleStore::build(rows, cfg, domain).unwrap()
    }

    fn cond(bounds: &[(i128, i128)]) -> Vec<Condition> {
        bounds.iter().map(|&b| Some(b)).collect()
    }

    #[test]
    fn build_exhaustive_grid() {
        let store = grid_store();
        assert_eq!(store.len(), 64);
    }

    #[test]
    fn duplicate_pk_keeps_last_row() {
        let cfg = SpaceConfig::new(2, 3).unwrap();
        let domain = ValueDomain::new(0, 3).unwrap();
        let rows = vec![(1u64, vec![0i64, 0]), (1, vec![5, 5])];
        let store = TupleStore::build(rows, cfg, domain).unwrap();
        assert_eq!(store.len(), 1);
        assert_eq!(store.full_scan(&cond(&[(5, 5), (5, 5)])).unwrap(), vec![1]);
        assert!(store.full_scan(&cond(&[(0, 0), (0, 0)])).unwrap().is_empty());
    }

    #[test]
    fn build_rejects_out_of_domain_values() {
        let cfg = SpaceConfig::new(2, 3).unwrap();
        let domain = ValueDomain::new(0, 3).unwrap();
        let err = TupleStore::build(vec![(7u64, vec![99i64, 0])], cfg, domain).unwrap_err();
        match err {
            Error::ValueOutsideDomain { pk, column, value, .. } => {
                assert_eq!((pk, column, value), (7, 0, 99));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn build_rejects_wrong_arity_and_bits() {
        let cfg = SpaceConfig::new(2, 3).unwrap();
        let domain = ValueDomain::new(0, 3).unwrap();
        assert!(matches!(
            TupleStore::build(vec![(1u64, vec![1i64])], cfg, domain),
            Err(Error::DimensionMismatch { .. })
        ));
        let wrong = ValueDomain::new(0, 4).unwrap();
        assert!(matches!(
            TupleStore::build(Vec::new(), cfg, wrong),
            Err(Error::Dataset(_))
        ));
    }

    #[test]
    fn query_modes_reference_counts() {
        let store = grid_store();
        let conditions = cond(&[(2, 5), (2, 5)]);

        let (pks, stats) = store.execute_query(&conditions, &QueryMode::Raw).unwrap();
        assert_eq!(pks.len(), 16);
        assert_eq!((stats.scanned, stats.matched, stats.subranges), (40, 16, 1));

        let (pks, stats) = store.execute_query(&conditions, &QueryMode::Exact).unwrap();
        assert_eq!(pks.len(), 16);
        assert_eq!((stats.scanned, stats.matched, stats.subranges), (16, 16, 4));
    }

    #[test]
    fn approx_stays_inside_the_raw_bracket() {
        let store = grid_store();
        let conditions = cond(&[(2, 5), (2, 5)]);
        // Threshold zero widens the region to the whole grid, yet the scan
        // must stay clipped to the original bracket [12, 51].
        let mode = QueryMode::Approx(ApproxParams::with_threshold(0.0));
        let (pks, stats) = store.execute_query(&conditions, &mode).unwrap();
        assert_eq!(pks.len(), 16);
        assert_eq!((stats.scanned, stats.matched, stats.subranges), (40, 16, 1));

        // A threshold above the initial total leaves the region untouched:
        // identical to exact mode.
        let mode = QueryMode::Approx(ApproxParams::with_threshold(500.0));
        let (_, stats) = store.execute_query(&conditions, &mode).unwrap();
        assert_eq!((stats.scanned, stats.matched, stats.subranges), (16, 16, 4));
    }

    #[test]
    fn disjoint_conditions_yield_empty_result() {
        let store = grid_store();
        let (pks, stats) = store
            .execute_query(&cond(&[(100, 200), (0, 7)]), &QueryMode::Exact)
            .unwrap();
        assert!(pks.is_empty());
        assert_eq!(stats, QueryStats::default());
        assert!(store.full_scan(&cond(&[(100, 200), (0, 7)])).unwrap().is_empty());
    }

    #[test]
    fn full_domain_conditions_return_everything() {
        let store = grid_store();
        let all = store.full_scan(&[None, None]).unwrap();
        assert_eq!(all.len(), 64);
        let (pks, stats) = store.execute_query(&[None, None], &QueryMode::Exact).unwrap();
        assert_eq!(pks, all);
        assert_eq!(stats.subranges, 1);
    }

    #[test]
    fn wrong_condition_arity_is_rejected() {
        let store = grid_store();
        assert!(matches!(
            store.execute_query(&[None], &QueryMode::Raw),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn modes_agree_with_full_scan() {
        let store = grid_store();
        let cases = [
            cond(&[(2, 5), (2, 5)]),
            cond(&[(3, 5), (1, 6)]),
            cond(&[(0, 0), (7, 7)]),
            vec![None, Some((4, 6))],
        ];
        for conditions in cases {
            let expect = store.full_scan(&conditions).unwrap();
            for mode in [
                QueryMode::Raw,
                QueryMode::Exact,
                QueryMode::Approx(ApproxParams::with_threshold(4.0)),
            ] {
                let (pks, stats) = store.execute_query(&conditions, &mode).unwrap();
                assert_eq!(pks, expect, "mode {mode:?} conditions {conditions:?}");
                assert_eq!(stats.matched as usize, expect.len());
            }
        }
    }

    #[test]
    fn scanned_ordering_across_modes() {
        let store = grid_store();
        for conditions in [cond(&[(2, 5), (2, 5)]), cond(&[(1, 6), (3, 4)]), cond(&[(0, 3), (0, 3)])] {
            let (_, raw) = store.execute_query(&conditions, &QueryMode::Raw).unwrap();
            let (_, exact) = store.execute_query(&conditions, &QueryMode::Exact).unwrap();
            let mode = QueryMode::Approx(ApproxParams::with_threshold(6.0));
            let (_, approx) = store.execute_query(&conditions, &mode).unwrap();
            assert_eq!(exact.scanned, exact.matched);
            assert!(approx.scanned >= exact.scanned);
            assert!(raw.scanned >= approx.scanned);
        }
    }

    #[test]
    fn csv_round_trip() {
        let store = grid_store();
        let mut bytes = Vec::new();
        store.save_csv(&mut bytes).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("pk,s1,s2\n"));
        let reloaded = TupleStore::load_csv(bytes.as_slice(), store.domain()).unwrap();
        assert_eq!(reloaded.len(), store.len());
        assert_eq!(
            reloaded.iter().map(|(z, pk, _)| (z, pk)).collect::<Vec<_>>(),
            store.iter().map(|(z, pk, _)| (z, pk)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn csv_rejects_malformed_input() {
        let domain = ValueDomain::new(0, 3).unwrap();
        assert!(TupleStore::load_csv("nope,s1\n1,2\n".as_bytes(), domain).is_err());
        assert!(TupleStore::load_csv("pk\n1\n".as_bytes(), domain).is_err());
        assert!(TupleStore::load_csv("pk,s1,s2\n1,2\n".as_bytes(), domain).is_err());
        assert!(TupleStore::load_csv("pk,s1,s2\nx,2,3\n".as_bytes(), domain).is_err());
        assert!(TupleStore::load_csv("pk,s1,s2\n1,2,oops\n".as_bytes(), domain).is_err());
    }
}
