//! NK landscapes: configurations, interaction maps, contribution tables and
//! the exhaustive small-n oracle.
//!
//! Substate packing: for node `i` with dependencies `deps[i] = [d0, d1, ..]`
//! the table index is `bit(i) | bit(d0) << 1 | bit(d1) << 2 | ...`, i.e. the
//! focal bit is the lowest-order position and dependency bits follow in list
//! order.
//!
//! Contribution entries of a generated landscape are positions of a
//! counter-based stream: entry `s` of node `i` is
//! `open_unit(splitmix_at(derive(seed, Contributions, i), s))`. A dense table
//! is that stream materialised in order; an on-demand landscape computes the
//! same values at lookup time, so both storages give bit-identical fitness.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NkError, Result};
use crate::rng::{self, StreamTag};

/// Default memory guard for dense tables, in entries.
pub const DEFAULT_ENTRY_CAP: u64 = 1 << 28;

/// Largest `n` accepted by [`Landscape::enumerate_global_optimum`].
pub const ENUMERATION_CAP: usize = 24;

/// `TableStorage::Auto` materialises tables up to this many entries.
pub const AUTO_DENSE_LIMIT: u64 = 1 << 14;

/// An N-bit decision string. Bit `i` belongs to node `i`; the textual form
/// (also used by serde) lists node 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Configuration {
    bits: Vec<u8>,
}

impl Configuration {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(NkError::domain("a configuration needs at least one bit"));
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(NkError::domain(format!(
                "bit {pos} has value {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(Self { bits })
    }

    /// Decodes an integer where bit `j` (LSB = 0) is node `j`.
    pub fn from_index(value: u64, n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(NkError::domain(format!("cannot decode {n} bits from a u64")));
        }
        if n < 64 && value >> n != 0 {
            return Err(NkError::domain(format!("{value} does not fit in {n} bits")));
        }
        Ok(Self {
            bits: (0..n).map(|j| ((value >> j) & 1) as u8).collect(),
        })
    }

    /// Inverse of [`Configuration::from_index`]; `None` above 64 bits.
    pub fn to_index(&self) -> Option<u64> {
        (self.bits.len() <= 64).then(|| {
            self.bits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &b)| acc | (u64::from(b) << j))
        })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(NkError::domain("n must be at least 1"));
        }
        Ok(Self {
            bits: (0..n).map(|_| u8::from(rng.gen::<bool>())).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, node: usize) -> bool {
        self.bits[node] == 1
    }

    pub fn flip(&mut self, node: usize) {
        self.bits[node] ^= 1;
    }

    pub fn flipped(&self, node: usize) -> Self {
        let mut next = self.clone();
        next.flip(node);
        next
    }

    pub fn hamming_distance(&self, other: &Self) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
            + self.bits.len().abs_diff(other.bits.len())
    }

    pub fn is_neighbor_of(&self, other: &Self) -> bool {
        self.n() == other.n() && self.hamming_distance(other) == 1
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [u8] {
        &mut self.bits
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = NkError;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(NkError::domain(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(bits)
    }
}

impl From<Configuration> for String {
    fn from(config: Configuration) -> String {
        config.to_string()
    }
}

impl TryFrom<String> for Configuration {
    type Error = NkError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// How each node picks the `k` nodes it depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DependencyScheme {
    /// Uniform sample without replacement from the other `n - 1` nodes.
    #[default]
    Random,
    /// The `k` nodes following `i` cyclically.
    Adjacent,
}

impl fmt::Display for DependencyScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DependencyScheme::Random => "random",
            DependencyScheme::Adjacent => "adjacent",
        })
    }
}

impl FromStr for DependencyScheme {
    type Err = NkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(DependencyScheme::Random),
            "adjacent" => Ok(DependencyScheme::Adjacent),
            other => Err(NkError::domain(format!("unknown dependency scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionMap {
    n: usize,
    k: usize,
    deps: Vec<Vec<usize>>,
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(NkError::domain("n must be at least 1"));
    }
    if k >= n {
        return Err(NkError::domain(format!("k must satisfy 0 <= k <= n - 1, got n = {n}, k = {k}")));
    }
    Ok(())
}

impl InteractionMap {
    pub fn build<R: Rng + ?Sized>(
        n: usize,
        k: usize,
        scheme: DependencyScheme,
        rng: &mut R,
    ) -> Result<Self> {
        check_nk(n, k)?;
        let deps = (0..n)
            .map(|i| match scheme {
                DependencyScheme::Adjacent => (1..=k).map(|step| (i + step) % n).collect(),
                DependencyScheme::Random => index::sample(rng, n - 1, k)
                    .into_iter()
                    // Skip over the focal node: sample from 0..n-1 and shift the upper part.
                    .map(|j| if j >= i { j + 1 } else { j })
                    .collect(),
            })
            .collect();
        Ok(Self { n, k, deps })
    }

    /// Validates an explicit dependency list.
    pub fn from_deps(n: usize, k: usize, deps: Vec<Vec<usize>>) -> Result<Self> {
        check_nk(n, k).map_err(|e| NkError::InvalidLandscape(e.to_string()))?;
        if deps.len() != n {
            return Err(NkError::InvalidLandscape(format!(
                "expected {n} dependency lists, found {}",
                deps.len()
            )));
        }
        for (i, list) in deps.iter().enumerate() {
            if list.len() != k {
                return Err(NkError::InvalidLandscape(format!(
                    "node {i} has {} dependencies, expected {k}",
                    list.len()
                )));
            }
            for (pos, &d) in list.iter().enumerate() {
                if d >= n || d == i || list[..pos].contains(&d) {
                    return Err(NkError::InvalidLandscape(format!(
                        "node {i} has invalid dependency {d}"
                    )));
                }
            }
        }
        Ok(Self { n, k, deps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn deps(&self, node: usize) -> &[usize] {
        &self.deps[node]
    }

    pub fn all(&self) -> &[Vec<usize>] {
        &self.deps
    }
}

/// Where contribution values live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableStorage {
    /// Materialise every table at generation time.
    #[default]
    Dense,
    /// Compute entries from the counter-based stream at lookup time.
    OnDemand,
    /// Dense when the landscape has at most [`AUTO_DENSE_LIMIT`] entries.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerateOptions {
    pub storage: TableStorage,
    /// Memory guard on dense tables.
    pub entry_cap: u64,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            storage: TableStorage::Dense,
            entry_cap: DEFAULT_ENTRY_CAP,
        }
    }
}

#[derive(Debug, Clone)]
enum Contributions {
    /// Node-major flat table with stride `2^(k+1)`.
    Dense(Vec<f64>),
    /// Per-node stream states.
    OnDemand(Vec<u64>),
}

#[derive(Debug, Clone)]
pub struct Landscape {
    interactions: InteractionMap,
    scheme: DependencyScheme,
    seed: u64,
    contributions: Contributions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalOptimumReport {
    pub optimum_config: Configuration,
    pub optimum_fitness: f64,
    pub local_optima_count: u64,
}

fn entry_count(n: usize, k: usize) -> u128 {
    (n as u128) << (k + 1)
}

impl Landscape {
    /// Generates a landscape with dense tables and the default entry cap.
    pub fn generate(n: usize, k: usize, scheme: DependencyScheme, seed: u64) -> Result<Self> {
        Self::generate_with(n, k, scheme, seed, GenerateOptions::default())
    }

    pub fn generate_with(
        n: usize,
        k: usize,
        scheme: DependencyScheme,
        seed: u64,
        options: GenerateOptions,
    ) -> Result<Self> {
        check_nk(n, k)?;
        if k + 1 >= 64 {
            return Err(NkError::domain(format!("k = {k} exceeds the 62-dependency limit")));
        }
        let entries = entry_count(n, k);
        let dense = match options.storage {
            TableStorage::Dense => true,
            TableStorage::OnDemand => false,
            TableStorage::Auto => entries <= u128::from(AUTO_DENSE_LIMIT),
        };
        if dense && entries > u128::from(options.entry_cap) {
            return Err(NkError::TooLarge {
                entries,
                cap: options.entry_cap,
            });
        }

        let mut deps_rng = rng::derived_stream(seed, StreamTag::Interactions, 0);
        let interactions = InteractionMap::build(n, k, scheme, &mut deps_rng)?;
        let states: Vec<u64> = (0..n as u64)
            .map(|i| rng::derive_seed(seed, StreamTag::Contributions, i))
            .collect();
        let contributions = if dense {
            let width = 1u64 << (k + 1);
            let mut flat = Vec::with_capacity(entries as usize);
            for &state in &states {
                flat.extend((0..width).map(|s| rng::open_unit(rng::splitmix_at(state, s))));
            }
            Contributions::Dense(flat)
        } else {
            Contributions::OnDemand(states)
        };

        Ok(Self {
            interactions,
            scheme,
            seed,
            contributions,
        })
    }

    /// Builds a landscape from explicit tables, validating every invariant.
    pub fn from_tables(
        interactions: InteractionMap,
        tables: Vec<Vec<f64>>,
        scheme: DependencyScheme,
        seed: u64,
    ) -> Result<Self> {
        let n = interactions.n();
        let width = 1usize << (interactions.k() + 1);
        if tables.len() != n {
            return Err(NkError::InvalidLandscape(format!(
                "expected {n} tables, found {}",
                tables.len()
            )));
        }
        let mut flat = Vec::with_capacity(n * width);
        for (i, table) in tables.into_iter().enumerate() {
            if table.len() != width {
                return Err(NkError::InvalidLandscape(format!(
                    "table {i} has {} entries, expected {width}",
                    table.len()
                )));
            }
            if let Some(bad) = table.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
                return Err(NkError::InvalidLandscape(format!(
                    "table {i} has entry {bad} outside (0, 1)"
                )));
            }
            flat.extend(table);
        }
        Ok(Self {
            interactions,
            scheme,
            seed,
            contributions: Contributions::Dense(flat),
        })
    }

    pub fn n(&self) -> usize {
        self.interactions.n()
    }

    pub fn k(&self) -> usize {
        self.interactions.k()
    }

    pub fn scheme(&self) -> DependencyScheme {
        self.scheme
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn interactions(&self) -> &InteractionMap {
        &self.interactions
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.contributions, Contributions::Dense(_))
    }

    pub fn table_width(&self) -> usize {
        1 << (self.k() + 1)
    }

    /// Contribution of `node` in packed substate `substate`.
    #[inline]
    pub fn contribution(&self, node: usize, substate: usize) -> f64 {
        match &self.contributions {
            Contributions::Dense(flat) => flat[node * self.table_width() + substate],
            Contributions::OnDemand(states) => {
                rng::open_unit(rng::splitmix_at(states[node], substate as u64))
            }
        }
    }

    /// Copies out one table, materialising it if needed.
    pub fn table(&self, node: usize) -> Vec<f64> {
        (0..self.table_width())
            .map(|s| self.contribution(node, s))
            .collect()
    }

    #[inline]
    pub(crate) fn substate(&self, node: usize, bits: &[u8]) -> usize {
        self.interactions
            .deps(node)
            .iter()
            .enumerate()
            .fold(usize::from(bits[node]), |acc, (pos, &d)| {
                acc | (usize::from(bits[d]) << (pos + 1))
            })
    }

    /// Fitness of a bit slice already known to have length `n`.
    #[inline]
    pub(crate) fn fitness_of_bits(&self, bits: &[u8]) -> f64 {
        let sum: f64 = (0..self.n())
            .map(|i| self.contribution(i, self.substate(i, bits)))
            .sum();
        sum / self.n() as f64
    }

    pub(crate) fn check_config(&self, config: &Configuration) -> Result<()> {
        if config.n() != self.n() {
            return Err(NkError::DimensionMismatch {
                expected: self.n(),
                got: config.n(),
            });
        }
        Ok(())
    }

    /// Mean of the per-node contributions.
    pub fn overall_fitness(&self, config: &Configuration) -> Result<f64> {
        self.check_config(config)?;
        Ok(self.fitness_of_bits(config.bits()))
    }

    /// True iff `config` is strictly fitter than each of its `n` one-bit neighbours.
    pub fn is_local_optimum(&self, config: &Configuration) -> Result<bool> {
        let here = self.overall_fitness(config)?;
        let mut probe = config.clone();
        for node in 0..self.n() {
            probe.flip(node);
            let there = self.fitness_of_bits(probe.bits());
            probe.flip(node);
            if there >= here {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn enumerate_global_optimum(&self) -> Result<GlobalOptimumReport> {
        self.enumerate_global_optimum_with_cap(ENUMERATION_CAP)
    }

    /// Scans all `2^n` configurations. Ties for the optimum go to the lowest
    /// integer encoding; local optima are counted under strict comparison.
    pub fn enumerate_global_optimum_with_cap(&self, cap: usize) -> Result<GlobalOptimumReport> {
        let n = self.n();
        if n > cap || n > 40 {
            return Err(NkError::EnumerationCap { n, cap });
        }
        let total = 1usize << n;
        let mut bits = vec![0u8; n];
        let mut fitness = Vec::with_capacity(total);
        for idx in 0..total {
            for (j, b) in bits.iter_mut().enumerate() {
                *b = ((idx >> j) & 1) as u8;
            }
            fitness.push(self.fitness_of_bits(&bits));
        }

        let mut best = 0usize;
        for (idx, &f) in fitness.iter().enumerate() {
            if f > fitness[best] {
                best = idx;
            }
        }
        let local_optima_count = (0..total)
            .filter(|&idx| (0..n).all(|j| fitness[idx ^ (1 << j)] < fitness[idx]))
            .count() as u64;

        Ok(GlobalOptimumReport {
            optimum_config: Configuration::from_index(best as u64, n)?,
            optimum_fitness: fitness[best],
            local_optima_count,
        })
    }

    pub fn to_document(&self) -> LandscapeDocument {
        LandscapeDocument {
            n: self.n(),
            k: self.k(),
            scheme: self.scheme,
            seed: self.seed,
            deps: self.interactions.all().to_vec(),
            tables: (0..self.n()).map(|i| self.table(i)).collect(),
        }
    }

    pub fn from_document(doc: LandscapeDocument) -> Result<Self> {
        let interactions = InteractionMap::from_deps(doc.n, doc.k, doc.deps)?;
        Self::from_tables(interactions, doc.tables, doc.scheme, doc.seed)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| NkError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| NkError::io(path, e))?;
        Self::from_json(&text)
    }
}

/// JSON interchange form of a landscape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandscapeDocument {
    pub n: usize,
    pub k: usize,
    pub scheme: DependencyScheme,
    #[serde(with = "crate::seed_serde")]
    pub seed: u64,
    pub deps: Vec<Vec<usize>>,
    pub tables: Vec<Vec<f64>>,
}

/// Draws a uniformly random start configuration.
pub fn random_config<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Configuration> {
    Configuration::random(n, rng)
}
