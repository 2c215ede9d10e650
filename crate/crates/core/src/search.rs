//! Brute-force enumeration of canonical solutions below a bound.
//!
//! In canonical form `b1 = 0`, so every `a` is a square and every other
//! `b_j` is a difference of two squares. The index maps each difference `d`
//! to the squares `x²` with `x² + d` square; a candidate `A` for a tuple
//! `(b2, …, bn)` is then a subset of the intersection of their lists.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arith::{is_square_u64, Integer, Ratio};
use crate::construct::{canonicalize, SolutionPair};
use crate::error::{Error, Result};
use crate::family::{generate, FamilyId};

/// Largest accepted bound; keeps every sum well inside `u64`.
pub const MAX_BOUND: u64 = 1 << 40;

#[derive(Clone, Debug)]
pub struct SearchIndex {
    bound: u64,
    sum_bound: u64,
    by_diff: HashMap<u64, Vec<u64>>,
}

impl SearchIndex {
    /// Ascending squares `x² ≤ N` with `x² + d` a square `≤ S`.
    pub fn get(&self, d: u64) -> &[u64] {
        self.by_diff.get(&d).map_or(&[], Vec::as_slice)
    }

    /// All differences with a nonempty list, ascending.
    pub fn diffs(&self) -> Vec<u64> {
        let mut ds: Vec<u64> = self.by_diff.keys().copied().collect();
        ds.sort_unstable();
        ds
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn sum_bound(&self) -> u64 {
        self.sum_bound
    }

    pub fn num_entries(&self) -> usize {
        self.by_diff.values().map(Vec::len).sum()
    }
}

impl PartialEq for SearchIndex {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.sum_bound == other.sum_bound && self.by_diff == other.by_diff
    }
}

pub fn build_index(n: u64, s: u64) -> Result<SearchIndex> {
    if n < 1 || n > s {
        return Err(Error::Domain(format!("index needs 1 <= N <= S, got N = {n}, S = {s}")));
    }
    if s > 2 * MAX_BOUND {
        return Err(Error::Domain(format!("sum bound {s} exceeds {}", 2 * MAX_BOUND)));
    }
    let (xmax, ymax) = (n.isqrt(), s.isqrt());
    let mut by_diff: HashMap<u64, Vec<u64>> = HashMap::new();
    for x in 0..=xmax {
        for y in x + 1..=ymax {
            by_diff.entry(y * y - x * x).or_default().push(x * x);
        }
    }
    Ok(SearchIndex { bound: n, sum_bound: s, by_diff })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub bound: u64,
    pub m: usize,
    pub n: usize,
    pub max_results: Option<usize>,
    pub threads: usize,
}

impl SearchConfig {
    pub fn new(bound: u64, shape: (usize, usize)) -> Self {
        SearchConfig { bound, m: shape.0, n: shape.1, max_results: None, threads: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bound < 1 || self.bound > MAX_BOUND {
            return Err(Error::Domain(format!("bound must be in 1..={MAX_BOUND}, got {}", self.bound)));
        }
        if self.m < 1 || self.n < 1 {
            return Err(Error::Domain(format!("shape must be at least (1,1), got ({},{})", self.m, self.n)));
        }
        if self.threads < 1 {
            return Err(Error::Domain("thread count must be at least 1".into()));
        }
        Ok(())
    }

    /// Search parameters only; two configs with equal keys produce equal output.
    fn same_search(&self, other: &SearchConfig) -> bool {
        (self.bound, self.m, self.n, self.max_results) == (other.bound, other.m, other.n, other.max_results)
    }
}

/// `(a, b)` with `a` strictly increasing squares and `b = (0, b2, …)` strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RawSolution {
    pub b: Vec<u64>,
    pub a: Vec<u64>,
}

impl RawSolution {
    pub fn to_pair(&self) -> SolutionPair {
        let conv = |xs: &[u64]| xs.iter().map(|&x| Ratio::from_integer(Integer::from(x))).collect();
        SolutionPair { a: conv(&self.a), b: conv(&self.b) }
    }
}

/// Intersection of two ascending lists, galloping through the longer one
/// when the lengths are lopsided.
pub fn intersect_sorted(x: &[u64], y: &[u64], out: &mut Vec<u64>) {
    out.clear();
    let (small, large) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    if small.is_empty() {
        return;
    }
    if large.len() / small.len() >= 16 {
        let mut lo = 0;
        for &v in small {
            let mut step = 1;
            while lo + step < large.len() && large[lo + step] < v {
                step *= 2;
            }
            let hi = (lo + step + 1).min(large.len());
            match large[lo..hi].binary_search(&v) {
                Ok(k) => {
                    out.push(v);
                    lo += k + 1;
                }
                Err(k) => lo += k,
            }
            if lo >= large.len() {
                break;
            }
        }
        return;
    }
    let (mut i, mut j) = (0, 0);
    while i < small.len() && j < large.len() {
        match small[i].cmp(&large[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(small[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// No `p²` divides `g` (with `g ≥ 1`).
fn is_square_free(mut g: u64) -> bool {
    let mut p = 2u64;
    while p.saturating_mul(p).saturating_mul(p) <= g {
        if g.is_multiple_of(p) {
            g /= p;
            if g.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    // The cofactor has at most two prime factors left.
    g == 1 || !is_square_u64(g)
}

/// Every `k`-subset of `items`, in lexicographic order.
fn for_each_combination(items: &[u64], k: usize, mut f: impl FnMut(&[u64])) {
    if k > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf = vec![0; k];
    loop {
        for (slot, &i) in buf.iter_mut().zip(&idx) {
            *slot = items[i];
        }
        f(&buf);
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < p + items.len() - k) else {
            return;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

struct Engine<'a> {
    index: &'a SearchIndex,
    cfg: &'a SearchConfig,
    /// Candidate `b2` values; `0` stands for the single unit of an `n = 1` search.
    units: Vec<u64>,
    squares: Vec<u64>,
}

impl<'a> Engine<'a> {
    fn new(index: &'a SearchIndex, cfg: &'a SearchConfig) -> Self {
        let squares: Vec<u64> = (0..=cfg.bound.isqrt()).map(|x| x * x).collect();
        let units = if cfg.n == 1 {
            vec![0]
        } else {
            index.diffs().into_iter().filter(|&d| d <= cfg.bound && index.get(d).len() >= cfg.m).collect()
        };
        Engine { index, cfg, units, squares }
    }

    fn emit(&self, b: &[u64], candidates: &[u64], out: &mut Vec<RawSolution>) {
        let gb = b.iter().fold(0, |g, &x| gcd(g, x));
        for_each_combination(candidates, self.cfg.m, |a| {
            let g = a.iter().fold(gb, |g, &x| gcd(g, x));
            if g == 0 || is_square_free(g) {
                debug_assert!(a.iter().all(|&x| b.iter().all(|&y| is_square_u64(x + y))));
                out.push(RawSolution { b: b.to_vec(), a: a.to_vec() });
            }
        });
    }

    fn extend(&self, b: &mut Vec<u64>, candidates: &[u64], out: &mut Vec<RawSolution>) {
        if b.len() == self.cfg.n {
            self.emit(b, candidates, out);
            return;
        }
        let last = *b.last().expect("b starts with 0");
        let mut next = Vec::new();
        let from = self.units.partition_point(|&d| d <= last);
        for &d in &self.units[from..] {
            intersect_sorted(candidates, self.index.get(d), &mut next);
            if next.len() >= self.cfg.m {
                b.push(d);
                self.extend(b, &next, out);
                b.pop();
            }
        }
    }

    fn run_unit(&self, b2: u64) -> Vec<RawSolution> {
        let mut out = Vec::new();
        if self.cfg.n == 1 {
            self.emit(&[0], &self.squares, &mut out);
        } else {
            let mut b = vec![0, b2];
            self.extend(&mut b, self.index.get(b2), &mut out);
        }
        out
    }

    /// Results of `units[range]`, concatenated in unit order.
    fn run_batch(&self, units: &[u64]) -> Vec<RawSolution> {
        let threads = self.cfg.threads.min(units.len()).max(1);
        if threads == 1 {
            return units.iter().flat_map(|&u| self.run_unit(u)).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Vec<RawSolution>>> = units.iter().map(|_| Mutex::new(Vec::new())).collect();
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let k = next.fetch_add(1, Ordering::Relaxed);
                    if k >= units.len() {
                        break;
                    }
                    *slots[k].lock().expect("slot") = self.run_unit(units[k]);
                });
            }
        });
        slots.into_iter().flat_map(|s| s.into_inner().expect("slot")).collect()
    }
}

fn batch_size(cfg: &SearchConfig) -> usize {
    cfg.threads * 8
}

/// Enumerates units in batches starting at `start`, handing each batch to
/// `sink` with the index of the last unit it covers; stops once
/// `max_results` solutions have been seen.
fn drive(
    cfg: &SearchConfig,
    start: usize,
    mut seen: usize,
    mut sink: impl FnMut(usize, Vec<RawSolution>) -> Result<()>,
) -> Result<usize> {
    cfg.validate()?;
    let index = build_index(cfg.bound, 2 * cfg.bound)?;
    let engine = Engine::new(&index, cfg);
    let mut pos = start;
    while pos < engine.units.len() {
        if cfg.max_results.is_some_and(|k| seen >= k) {
            break;
        }
        let end = (pos + batch_size(cfg)).min(engine.units.len());
        let mut batch = engine.run_batch(&engine.units[pos..end]);
        if let Some(k) = cfg.max_results {
            batch.truncate(k.saturating_sub(seen));
        }
        seen += batch.len();
        sink(end - 1, batch)?;
        pos = end;
    }
    Ok(seen)
}

/// All canonical solutions of the configured shape with elements `≤ bound`,
/// ordered by `b` then `a`.
pub fn find_solutions(cfg: &SearchConfig) -> Result<Vec<SolutionPair>> {
    let mut out = Vec::new();
    drive(cfg, 0, 0, |_, batch| {
        out.extend(batch.iter().map(RawSolution::to_pair));
        Ok(())
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossValidation {
    pub canonical: SolutionPair,
    /// Distinct elements of the canonical pair, the shape actually searched.
    pub support: SolutionPair,
    pub found: bool,
    pub results: usize,
}

/// Largest element of a canonical pair as an integer.
fn max_element(p: &SolutionPair) -> Integer {
    p.a.iter().chain(&p.b).map(|x| x.to_integer()).max().unwrap_or_default()
}

pub fn cross_validate(id: FamilyId, params: &[Integer], bound: u64) -> Result<CrossValidation> {
    let canonical = canonicalize(&generate(id, params)?.pair)?;
    let required = max_element(&canonical);
    if required > Integer::from(bound) {
        return Err(Error::BoundTooSmall { required: required.to_string() });
    }
    let dedup = |xs: &[Ratio]| {
        let mut v = xs.to_vec();
        v.dedup();
        v
    };
    let support = SolutionPair { a: dedup(&canonical.a), b: dedup(&canonical.b) };
    let cfg = SearchConfig::new(bound, support.shape());
    let results = find_solutions(&cfg)?;
    Ok(CrossValidation {
        found: results.contains(&support),
        results: results.len(),
        canonical,
        support,
    })
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    schema: u32,
    config: SearchConfig,
    /// Index of the last completed `b2` unit.
    last_unit: usize,
    /// The `b2` value of that unit (informational).
    last_b2: u64,
    written: usize,
}

pub fn checkpoint_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".ckpt");
    PathBuf::from(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamSummary {
    pub count: usize,
    pub elapsed_ms: u128,
    pub resumed: bool,
}

/// Writes the search as JSON lines (header, solutions, footer) to `output`,
/// with a checkpoint beside it after every batch. With `resume`, an earlier
/// interrupted run with the same configuration continues where it stopped.
pub fn search_to_jsonl(cfg: &SearchConfig, output: &Path, resume: bool) -> Result<StreamSummary> {
    cfg.validate()?;
    let started = Instant::now();
    let ckpt_path = checkpoint_path(output);
    let mut start = 0;
    let mut written = 0;
    let mut resumed = false;

    if resume && ckpt_path.exists() {
        let ck: Checkpoint = serde_json::from_str(&fs::read_to_string(&ckpt_path)?)?;
        if !ck.config.same_search(cfg) {
            return Err(Error::Rejected(format!(
                "checkpoint {} was written for a different search configuration",
                ckpt_path.display()
            )));
        }
        let kept = read_prefix(output, ck.written)?;
        fs::write(output, kept)?;
        start = ck.last_unit + 1;
        written = ck.written;
        resumed = true;
    } else {
        let mut f = File::create(output)?;
        writeln!(f, "{}", crate::io::search_header(cfg))?;
    }

    let mut file = BufWriter::new(OpenOptions::new().append(true).open(output)?);
    let index = build_index(cfg.bound, 2 * cfg.bound)?;
    let units = Engine::new(&index, cfg).units;
    drop(index);
    let total = drive(cfg, start, written, |last_unit, batch| {
        for sol in &batch {
            writeln!(file, "{}", crate::io::search_solution(&sol.to_pair()))?;
        }
        file.flush()?;
        written += batch.len();
        let ck = Checkpoint { schema: 1, config: cfg.clone(), last_unit, last_b2: units[last_unit], written };
        let tmp = ckpt_path.with_extension("ckpt.tmp");
        fs::write(&tmp, serde_json::to_string(&ck)?)?;
        fs::rename(&tmp, &ckpt_path)?;
        Ok(())
    })?;
    let elapsed_ms = started.elapsed().as_millis();
    writeln!(file, "{}", crate::io::search_footer(total, elapsed_ms))?;
    file.flush()?;
    if ckpt_path.exists() {
        fs::remove_file(&ckpt_path)?;
    }
    Ok(StreamSummary { count: total, elapsed_ms, resumed })
}

/// Header plus the first `solutions` solution records of a stream.
fn read_prefix(path: &Path, solutions: usize) -> Result<String> {
    let mut out = String::new();
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Rejected(format!("{} is empty", path.display())))??;
    out.push_str(&header);
    out.push('\n');
    for _ in 0..solutions {
        let line = lines
            .next()
            .ok_or_else(|| Error::Rejected(format!("{} is shorter than its checkpoint", path.display())))??;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}
