//! Frequency sampling designs.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`. Each
//! independent draw uses its own stream (`set_stream`): band `k` of a
//! hierarchical design uses stream `k`, trimming uses [`TRIM_STREAM`], filling
//! uses [`FILL_STREAM`] and uniform designs use stream 0. A draw of `k` items
//! from a lexicographically sorted candidate list is a partial Fisher-Yates
//! shuffle whose swap targets come from Lemire's bounded-integer method on
//! `next_u64`. This is recorded in every design file header.

use std::collections::{BTreeSet, HashMap};

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::fourier::io::fmt_g17;
use crate::fourier::FrequencyIndex;

pub const TRIM_STREAM: u64 = 1000;
pub const FILL_STREAM: u64 = 2000;
pub const RNG_DESCRIPTION: &str =
    "chacha8;seed_from_u64;stream:band=k,trim=1000,fill=2000,uniform=0;lemire-bounded;partial-fisher-yates";

/// Largest `|xi|_inf` any design may use; keeps candidate enumeration bounded.
const MAX_RADIUS: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalParams {
    pub k0: u32,
    pub alpha: f64,
    pub k_cap: u32,
    pub n_target: usize,
}

impl HierarchicalParams {
    /// Defaults: `k0` is the largest `k >= 2` whose low block
    /// `|xi|_inf <= 2^k` uses at most half of `n`; `k_cap` is
    /// `min(ceil(k0 (1 + d/alpha)) - 1, 9)`.
    pub fn with_defaults(n_target: usize, dim: usize, alpha: f64) -> Self {
        let mut k0 = 2u32;
        while block_size(dim, 1u64 << (k0 + 1)) * 2 <= n_target as u128 {
            k0 += 1;
        }
        Self {
            k0,
            alpha,
            k_cap: default_k_cap(k0, dim, alpha),
            n_target,
        }
    }

    /// Band budget `ceil(2^{d k0 - alpha (k - k0)})`.
    pub fn band_budget(&self, dim: usize, k: u32) -> usize {
        let e = (dim as f64) * self.k0 as f64 - self.alpha * (k as f64 - self.k0 as f64);
        (2f64.powf(e).ceil() as usize).max(1)
    }

    pub fn max_radius(&self) -> u64 {
        if self.k_cap > self.k0 {
            1 << (self.k_cap + 1)
        } else {
            1 << self.k0
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k0 < 2 {
            return param(format!("k0 must be >= 2, got {}", self.k0));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return param(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.k_cap < self.k0 {
            return param(format!("k_cap {} below k0 {}", self.k_cap, self.k0));
        }
        if self.max_radius() > MAX_RADIUS {
            return param(format!("k_cap {} reaches beyond |xi| = {MAX_RADIUS}", self.k_cap));
        }
        if self.n_target == 0 {
            return param("n_target must be positive");
        }
        Ok(())
    }
}

pub fn default_k_cap(k0: u32, dim: usize, alpha: f64) -> u32 {
    let raw = (k0 as f64 * (1.0 + dim as f64 / alpha)).ceil() as i64 - 1;
    (raw.min(9) as u32).max(k0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum Scheme {
    LowestBlock { m: u64 },
    Hierarchical(HierarchicalParams),
    UniformRandom { half_width: u64, n_target: usize },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::LowestBlock { .. } => "lowest_block",
            Scheme::Hierarchical(_) => "hierarchical",
            Scheme::UniformRandom { .. } => "uniform_random",
        }
    }

    fn params_line(&self) -> String {
        match self {
            Scheme::LowestBlock { m } => format!("m={m}"),
            Scheme::Hierarchical(p) => format!(
                "k0={},alpha={},k_cap={},n_target={}",
                p.k0,
                fmt_g17(p.alpha),
                p.k_cap,
                p.n_target
            ),
            Scheme::UniformRandom { half_width, n_target } => {
                format!("half_width={half_width},n_target={n_target}")
            }
        }
    }

    fn bound(&self) -> u64 {
        match self {
            Scheme::LowestBlock { m } => *m,
            Scheme::Hierarchical(p) => p.max_radius(),
            Scheme::UniformRandom { half_width, .. } => *half_width,
        }
    }

    fn expected_count(&self, dim: usize) -> u128 {
        match self {
            Scheme::LowestBlock { m } => block_size(dim, *m),
            Scheme::Hierarchical(p) => p.n_target as u128,
            Scheme::UniformRandom { n_target, .. } => *n_target as u128,
        }
    }
}

/// A duplicate-free, lexicographically sorted set of sampled frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingDesign {
    dim: usize,
    freqs: Vec<FrequencyIndex>,
    scheme: Scheme,
    seed: u64,
}

impl SamplingDesign {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn freqs(&self) -> &[FrequencyIndex] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn max_sup_norm(&self) -> u64 {
        self.freqs.iter().map(|f| f.sup_norm()).max().unwrap_or(0)
    }

    pub fn contains(&self, xi: &FrequencyIndex) -> bool {
        self.freqs.binary_search(xi).is_ok()
    }

    fn build(dim: usize, freqs: impl IntoIterator<Item = FrequencyIndex>, scheme: Scheme, seed: u64) -> Result<Self> {
        let mut freqs: Vec<_> = freqs.into_iter().collect();
        freqs.sort();
        let d = Self { dim, freqs, scheme, seed };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        for w in self.freqs.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Duplicate(w[0].to_string()));
            }
        }
        let bound = self.scheme.bound();
        if let Some(bad) = self.freqs.iter().find(|f| f.dim() != self.dim || f.sup_norm() > bound) {
            return Err(Error::Parameter(format!("frequency {bad} outside the declared bound {bound}")));
        }
        let want = self.scheme.expected_count(self.dim);
        if self.freqs.len() as u128 != want {
            return Err(Error::Parameter(format!(
                "design lists {} frequencies, scheme requires {want}",
                self.freqs.len()
            )));
        }
        if let Scheme::LowestBlock { m } = self.scheme {
            if self.freqs.iter().any(|f| f.sup_norm() > m) {
                return param("lowest block contains out-of-block frequency");
            }
        }
        Ok(())
    }

    /// Serialize to the plain-text design format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# scheme={}", self.scheme.name()).unwrap();
        writeln!(s, "# seed={}", self.seed).unwrap();
        writeln!(s, "# params={}", self.scheme.params_line()).unwrap();
        writeln!(s, "# dim={}", self.dim).unwrap();
        writeln!(s, "# rng={RNG_DESCRIPTION}").unwrap();
        for f in &self.freqs {
            let row: Vec<String> = f.components().iter().map(|c| c.to_string()).collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            msg,
        };
        let mut headers: HashMap<String, (usize, String)> = HashMap::new();
        let mut rows: Vec<(usize, FrequencyIndex)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let (k, v) = h
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| perr(ln, format!("malformed header `{line}`")))?;
                headers.insert(k.trim().to_string(), (ln, v.trim().to_string()));
                continue;
            }
            let xi = line
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| perr(ln, format!("bad frequency row `{line}`: {e}")))?;
            if xi.is_empty() {
                return Err(perr(ln, "empty row".into()));
            }
            rows.push((ln, FrequencyIndex::new(xi)));
        }
        let get = |k: &str| headers.get(k).ok_or_else(|| perr(1, format!("missing `# {k}=` header")));
        let (ln, scheme_name) = get("scheme")?;
        let (seed_ln, seed) = get("seed")?;
        let seed: u64 = seed.parse().map_err(|e| perr(*seed_ln, format!("bad seed: {e}")))?;
        let (pl, params) = get("params")?;
        let kv: HashMap<&str, &str> = params
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|p| p.split_once('=').ok_or_else(|| perr(*pl, format!("bad params entry `{p}`"))))
            .collect::<Result<_>>()?;
        let num = |k: &str| -> Result<&str> { kv.get(k).copied().ok_or_else(|| perr(*pl, format!("params missing `{k}`"))) };
        macro_rules! parse_num {
            ($k:expr, $t:ty) => {
                num($k)?.parse::<$t>().map_err(|e| perr(*pl, format!("bad `{}`: {e}", $k)))?
            };
        }
        let scheme = match scheme_name.as_str() {
            "lowest_block" => Scheme::LowestBlock { m: parse_num!("m", u64) },
            "hierarchical" => Scheme::Hierarchical(HierarchicalParams {
                k0: parse_num!("k0", u32),
                alpha: parse_num!("alpha", f64),
                k_cap: parse_num!("k_cap", u32),
                n_target: parse_num!("n_target", usize),
            }),
            "uniform_random" => Scheme::UniformRandom {
                half_width: parse_num!("half_width", u64),
                n_target: parse_num!("n_target", usize),
            },
            other => return Err(perr(*ln, format!("unknown scheme `{other}`"))),
        };
        let dim = match headers.get("dim") {
            Some((dl, v)) => v.parse().map_err(|e| perr(*dl, format!("bad dim: {e}")))?,
            None => rows.first().map(|(_, f)| f.dim()).ok_or_else(|| perr(1, "no dim header and no rows".into()))?,
        };
        let mut seen = BTreeSet::new();
        for (ln, f) in &rows {
            if f.dim() != dim {
                return Err(perr(*ln, format!("row has {} components, expected {dim}", f.dim())));
            }
            if !seen.insert(f.clone()) {
                return Err(Error::Duplicate(format!("{f} at {}:{ln}", origin.display())));
            }
        }
        Self::build(dim, rows.into_iter().map(|(_, f)| f), scheme, seed)
    }
}

fn block_size(dim: usize, radius: u64) -> u128 {
    (2 * radius as u128 + 1).pow(dim as u32)
}

/// All `|xi|_inf <= m`, sorted.
pub fn lowest_block(m: u64, dim: usize) -> Result<SamplingDesign> {
    if dim == 0 {
        return param("dimension must be positive");
    }
    if m > MAX_RADIUS {
        return param(format!("m = {m} exceeds {MAX_RADIUS}"));
    }
    SamplingDesign::build(dim, crate::fourier::block(dim, m), Scheme::LowestBlock { m }, 0)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform integer in `[0, n)` (Lemire's method).
fn bounded(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    debug_assert!(n > 0);
    let mut m = rng.next_u64() as u128 * n as u128;
    let mut low = m as u64;
    if low < n {
        let threshold = n.wrapping_neg() % n;
        while low < threshold {
            m = rng.next_u64() as u128 * n as u128;
            low = m as u64;
        }
    }
    (m >> 64) as u64
}

/// First `k` positions of a partial Fisher-Yates shuffle of `0..len`,
/// tracked sparsely so huge `len` costs only `O(k)` memory.
fn sample_positions(rng: &mut ChaCha8Rng, len: u64, k: usize) -> Vec<u64> {
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(k);
    for i in 0..k as u64 {
        let j = i + bounded(rng, len - i);
        let vj = *swapped.get(&j).unwrap_or(&j);
        let vi = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, vi);
        out.push(vj);
    }
    out
}

/// Sorted universe offsets of unselected frequencies with
/// `lo <= |xi|_inf <= hi`; the universe is the radius-`radius` block.
fn band_candidates(dim: usize, radius: u64, lo: u64, hi: u64, selected: &[bool]) -> Vec<u64> {
    let mut xi = vec![0i64; dim];
    (0..selected.len())
        .filter(|&flat| {
            if selected[flat] {
                return false;
            }
            decode(flat, radius, &mut xi);
            let n = xi.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
            lo <= n && n <= hi
        })
        .map(|f| f as u64)
        .collect()
}

fn decode(mut flat: usize, radius: u64, xi: &mut [i64]) {
    let side = 2 * radius as usize + 1;
    for c in xi.iter_mut().rev() {
        *c = (flat % side) as i64 - radius as i64;
        flat /= side;
    }
}

fn draw(rng: &mut ChaCha8Rng, pool: &[u64], k: usize) -> Vec<u64> {
    let k = k.min(pool.len());
    sample_positions(rng, pool.len() as u64, k)
        .into_iter()
        .map(|p| pool[p as usize])
        .collect()
}

/// Full low block `|xi|_inf <= 2^{k0}` plus `ceil(2^{d k0 - alpha (k - k0)})`
/// random draws from each band `B_k`, `k0 < k <= k_cap`, adjusted to exactly
/// `n_target` frequencies: surplus is removed at random from the highest
/// band downward (the low block last), deficit is filled at random from the
/// lowest band upward.
pub fn hierarchical(p: &HierarchicalParams, dim: usize, seed: u64) -> Result<SamplingDesign> {
    p.validate()?;
    if dim == 0 {
        return param("dimension must be positive");
    }
    let radius = p.max_radius();
    let universe = block_size(dim, radius);
    if p.n_target as u128 > universe {
        return param(format!(
            "n_target {} exceeds the {universe} frequencies available up to |xi| = {radius}",
            p.n_target
        ));
    }
    let mut selected = vec![false; universe as usize];
    let mut count = 0usize;
    let low = band_candidates(dim, radius, 0, 1 << p.k0, &selected);
    for &f in &low {
        selected[f as usize] = true;
    }
    count += low.len();
    let mut drawn: Vec<Vec<u64>> = Vec::new();
    for k in p.k0 + 1..=p.k_cap {
        let pool = band_candidates(dim, radius, 1 << (k - 1), 1 << (k + 1), &selected);
        let mut picks = draw(&mut rng(seed, k as u64), &pool, p.band_budget(dim, k));
        for &f in &picks {
            selected[f as usize] = true;
        }
        count += picks.len();
        picks.sort_unstable();
        drawn.push(picks);
    }
    if count > p.n_target {
        let mut r = rng(seed, TRIM_STREAM);
        for group in drawn.iter().rev().chain(std::iter::once(&low)) {
            let excess = count - p.n_target;
            if excess == 0 {
                break;
            }
            for f in draw(&mut r, group, excess) {
                selected[f as usize] = false;
                count -= 1;
            }
        }
    } else if count < p.n_target {
        let mut r = rng(seed, FILL_STREAM);
        for k in p.k0 + 1..=p.k_cap {
            let missing = p.n_target - count;
            if missing == 0 {
                break;
            }
            let pool = band_candidates(dim, radius, 1 << (k - 1), 1 << (k + 1), &selected);
            for f in draw(&mut r, &pool, missing) {
                selected[f as usize] = true;
                count += 1;
            }
        }
    }
    if count != p.n_target {
        return Err(Error::Numerical(format!(
            "hierarchical design ended with {count} frequencies instead of {}",
            p.n_target
        )));
    }
    let freqs = selected.iter().enumerate().filter(|(_, &s)| s).map(|(flat, _)| {
        let mut xi = vec![0i64; dim];
        decode(flat, radius, &mut xi);
        FrequencyIndex::new(xi)
    });
    SamplingDesign::build(dim, freqs, Scheme::Hierarchical(p.clone()), seed)
}

/// `n_target` distinct frequencies drawn uniformly from `|xi|_inf <= W`.
pub fn uniform_random(n_target: usize, half_width: u64, dim: usize, seed: u64) -> Result<SamplingDesign> {
    if dim == 0 {
        return param("dimension must be positive");
    }
    if half_width > MAX_RADIUS {
        return param(format!("half width {half_width} exceeds {MAX_RADIUS}"));
    }
    let total = block_size(dim, half_width);
    if n_target as u128 > total {
        return param(format!("cannot draw {n_target} distinct frequencies from {total}"));
    }
    let mut r = rng(seed, 0);
    let freqs = sample_positions(&mut r, total as u64, n_target)
        .into_iter()
        .map(|flat| {
            let mut xi = vec![0i64; dim];
            decode(flat as usize, half_width, &mut xi);
            FrequencyIndex::new(xi)
        });
    SamplingDesign::build(
        dim,
        freqs,
        Scheme::UniformRandom {
            half_width,
            n_target,
        },
        seed,
    )
}

pub fn design_write(design: &SamplingDesign, path: &Path) -> Result<()> {
    design.write(path)
}

pub fn design_read(path: &Path) -> Result<SamplingDesign> {
    SamplingDesign::read(path)
}
