//! Piecewise-constant Hamiltonian parameters and their JSON form.
//!
//! ```json
//! {"n_qubits": 2, "total_time": 1.58, "symmetric": true,
//!  "chunks": [{"K": [2.49, 2.49], "eps": [0.093, 0.093], "zeta": {"0,1": 0.0382}}]}
//! ```

use crate::error::{Error, Result};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;

/// Unordered pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn pairs(n_qubits: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n_qubits).flat_map(move |i| (i + 1..n_qubits).map(move |j| (i, j)))
}

pub fn pair_count(n_qubits: usize) -> usize {
    n_qubits * n_qubits.saturating_sub(1) / 2
}

/// Position of `(i, j)` in [`pairs`] order.
pub fn pair_index(i: usize, j: usize, n_qubits: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * n_qubits - i * (i + 1) / 2 + (j - i - 1)
}

/// Hamiltonian coefficients held constant over one time chunk.
#[derive(Clone, Debug, PartialEq)]
pub struct ChunkParams {
    /// Tunneling amplitude per qubit (X coefficient).
    pub k: Vec<f64>,
    /// Bias per qubit (Z coefficient).
    pub eps: Vec<f64>,
    /// Coupling per pair in [`pairs`] order (ZZ coefficient).
    pub zeta: Vec<f64>,
}

impl ChunkParams {
    pub fn uniform(n_qubits: usize, k: f64, eps: f64, zeta: f64) -> Self {
        Self {
            k: vec![k; n_qubits],
            eps: vec![eps; n_qubits],
            zeta: vec![zeta; pair_count(n_qubits)],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.k.len()
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for (name, len, want) in [
            ("K", self.k.len(), n_qubits),
            ("eps", self.eps.len(), n_qubits),
            ("zeta", self.zeta.len(), pair_count(n_qubits)),
        ] {
            if len != want {
                return Err(Error::InvalidArgument(format!(
                    "{name} has {len} entries, expected {want}"
                )));
            }
        }
        if self.values().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("chunk parameter".into()));
        }
        Ok(())
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.k.iter().chain(&self.eps).chain(&self.zeta).copied()
    }

    pub fn zeta_of(&self, i: usize, j: usize) -> f64 {
        self.zeta[pair_index(i, j, self.n_qubits())]
    }

    /// All K equal, all ε equal, all ζ equal.
    pub fn is_uniform(&self) -> bool {
        fn same(v: &[f64]) -> bool {
            v.windows(2).all(|w| w[0] == w[1])
        }
        same(&self.k) && same(&self.eps) && same(&self.zeta)
    }

    pub fn is_zero(&self) -> bool {
        self.values().all(|v| v == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    n_qubits: usize,
    chunks: Vec<ChunkParams>,
    total_time: f64,
    symmetric: bool,
}

/// Symmetric per-chunk values `(K, ε, ζ)`.
pub type SharedParams = (f64, f64, f64);

impl Schedule {
    pub fn new(n_qubits: usize, chunks: Vec<ChunkParams>, total_time: f64, symmetric: bool) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("schedule needs at least one qubit".into()));
        }
        if chunks.is_empty() {
            return Err(Error::InvalidArgument("schedule has no chunks".into()));
        }
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "total_time must be positive, got {total_time}"
            )));
        }
        for (idx, c) in chunks.iter().enumerate() {
            c.validate(n_qubits)
                .map_err(|e| Error::InvalidArgument(format!("chunk {idx}: {e}")))?;
            if symmetric && !c.is_uniform() {
                return Err(Error::InvalidArgument(format!(
                    "chunk {idx} is not uniform but the schedule is flagged symmetric"
                )));
            }
        }
        Ok(Self {
            n_qubits,
            chunks,
            total_time,
            symmetric,
        })
    }

    /// Fully symmetric schedule from shared per-chunk values.
    pub fn symmetric(n_qubits: usize, total_time: f64, shared: &[SharedParams]) -> Result<Self> {
        let chunks = shared
            .iter()
            .map(|&(k, e, z)| ChunkParams::uniform(n_qubits, k, e, z))
            .collect();
        Self::new(n_qubits, chunks, total_time, true)
    }

    pub fn zero(n_qubits: usize, chunk_count: usize, total_time: f64) -> Result<Self> {
        Self::symmetric(n_qubits, total_time, &vec![(0.0, 0.0, 0.0); chunk_count])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn chunks(&self) -> &[ChunkParams] {
        &self.chunks
    }

    pub fn chunk_count(&self) -> usize {
        self.chunks.len()
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.chunks.len() as f64
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// `(K, ε, ζ)` per chunk, read from qubit 0 and pair (0,1).
    /// Only meaningful for symmetric schedules.
    pub fn shared_params(&self) -> Vec<SharedParams> {
        self.chunks
            .iter()
            .map(|c| (c.k[0], c.eps[0], c.zeta.first().copied().unwrap_or(0.0)))
            .collect()
    }

    /// Same piecewise-constant function on `factor`× finer chunks.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidArgument("refinement factor must be positive".into()));
        }
        let chunks = self
            .chunks
            .iter()
            .flat_map(|c| std::iter::repeat_n(c.clone(), factor))
            .collect();
        Self::new(self.n_qubits, chunks, self.total_time, self.symmetric)
    }

    /// Symmetric schedule carried over to a register of `n_qubits`.
    pub fn resized(&self, n_qubits: usize) -> Result<Self> {
        if !self.symmetric {
            return Err(Error::InvalidArgument(
                "only symmetric schedules can be resized".into(),
            ));
        }
        Self::symmetric(n_qubits, self.total_time, &self.shared_params())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSchedule = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.into_schedule()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChunk {
    #[serde(rename = "K")]
    k: Vec<f64>,
    eps: Vec<f64>,
    zeta: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    n_qubits: usize,
    total_time: f64,
    chunks: Vec<RawChunk>,
    #[serde(default)]
    symmetric: bool,
}

fn parse_pair_key(key: &str, n_qubits: usize) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("zeta key \"{key}\" is not of the form \"i,j\" with i < j < {n_qubits}"));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let i: usize = a.trim().parse().map_err(|_| bad())?;
    let j: usize = b.trim().parse().map_err(|_| bad())?;
    if i >= j || j >= n_qubits {
        return Err(bad());
    }
    Ok((i, j))
}

impl RawSchedule {
    fn into_schedule(self) -> Result<Schedule> {
        let n = self.n_qubits;
        let mut chunks = Vec::with_capacity(self.chunks.len());
        for (idx, rc) in self.chunks.into_iter().enumerate() {
            let mut zeta = vec![None; pair_count(n)];
            for (key, v) in &rc.zeta {
                let (i, j) = parse_pair_key(key, n)?;
                let slot = &mut zeta[pair_index(i, j, n)];
                if slot.replace(*v).is_some() {
                    return Err(Error::Parse(format!("chunk {idx}: duplicate zeta key \"{key}\"")));
                }
            }
            let zeta = zeta
                .into_iter()
                .zip(pairs(n))
                .map(|(z, (i, j))| {
                    z.ok_or_else(|| Error::Parse(format!("chunk {idx}: zeta missing key \"{i},{j}\"")))
                })
                .collect::<Result<Vec<_>>>()?;
            chunks.push(ChunkParams {
                k: rc.k,
                eps: rc.eps,
                zeta,
            });
        }
        Schedule::new(n, chunks, self.total_time, self.symmetric)
    }
}

struct ZetaMap<'a>(&'a [f64], usize);

impl Serialize for ZetaMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for ((i, j), v) in pairs(self.1).zip(self.0) {
            map.serialize_entry(&format!("{i},{j}"), v)?;
        }
        map.end()
    }
}

impl Serialize for Schedule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Chunk<'a> {
            #[serde(rename = "K")]
            k: &'a [f64],
            eps: &'a [f64],
            zeta: ZetaMap<'a>,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            n_qubits: usize,
            total_time: f64,
            symmetric: bool,
            chunks: Vec<Chunk<'a>>,
        }
        Doc {
            n_qubits: self.n_qubits,
            total_time: self.total_time,
            symmetric: self.symmetric,
            chunks: self
                .chunks
                .iter()
                .map(|c| Chunk {
                    k: &c.k,
                    eps: &c.eps,
                    zeta: ZetaMap(&c.zeta, self.n_qubits),
                })
                .collect(),
        }
        .serialize(s)
    }
}
