use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distribution::WorkHeatPmf;
use crate::error::{domain, Error, Result};
use crate::export::{fmt_f64, Table};
use crate::moments::Moments;

/// Default ceiling on both the excluded Gibbs mass and the boundary leakage.
pub const LEAKAGE_TOLERANCE: f64 = 1e-8;

/// Unitary stroke `exp(c T - c^* T^dag)` with `T` a ladder monomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrokeKind {
    /// `T = a^dag b`; conserves `a^dag a + b^dag b`.
    BeamSplitter { theta: Complex64 },
    /// `T = a^dag b^dag`; conserves `a^dag a - b^dag b`.
    TwoModeSqueeze { r: f64 },
    /// `T = a^dag b^2`; conserves `2 a^dag a + b^dag b`.
    CubicExchange { theta: Complex64 },
}

struct Monomial {
    a_up: u32,
    a_down: u32,
    b_up: u32,
    b_down: u32,
}

impl StrokeKind {
    pub fn beam_splitter(theta: f64) -> Self {
        Self::BeamSplitter {
            theta: theta.into(),
        }
    }

    fn coupling(&self) -> Complex64 {
        match *self {
            Self::BeamSplitter { theta } | Self::CubicExchange { theta } => theta,
            Self::TwoModeSqueeze { r } => r.into(),
        }
    }

    fn monomial(&self) -> Monomial {
        let (a_up, a_down, b_up, b_down) = match self {
            Self::BeamSplitter { .. } => (1, 0, 0, 1),
            Self::TwoModeSqueeze { .. } => (1, 0, 1, 0),
            Self::CubicExchange { .. } => (1, 0, 0, 2),
        };
        Monomial {
            a_up,
            a_down,
            b_up,
            b_down,
        }
    }

    /// Weights `(c_a, c_b)` of the conserved charge `c_a dm + c_b dn`.
    pub fn charge(&self) -> (i64, i64) {
        match self {
            Self::BeamSplitter { .. } => (1, 1),
            Self::TwoModeSqueeze { .. } => (1, -1),
            Self::CubicExchange { .. } => (2, 1),
        }
    }

    /// Weights of the truncation region `w_a m + w_b n <= n_max`.
    pub fn region_weights(&self) -> (u32, u32) {
        match self {
            Self::CubicExchange { .. } => (2, 1),
            _ => (1, 1),
        }
    }
}

/// Truncated Fock region `w_a m + w_b n <= n_max` and the exact Gibbs mass
/// it excludes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub n_max: usize,
    pub weights: (u32, u32),
    pub tail_bound: f64,
    /// Largest acceptable excluded mass or boundary leakage.
    pub tolerance: f64,
}

fn ratio(n: f64) -> f64 {
    n / (n + 1.0)
}

/// Gibbs mass outside `w_a m + w_b n <= n_max`, summed term by term.
fn excluded_mass(n_max: usize, (wa, wb): (u32, u32), n_a: f64, n_b: f64) -> f64 {
    let (qa, qb) = (ratio(n_a), ratio(n_b));
    let m_top = n_max / wa as usize;
    let mut total = qa.powi(m_top as i32 + 1);
    let mut pa = 1.0 - qa;
    for m in 0..=m_top {
        let n_top = (n_max - wa as usize * m) / wb as usize;
        total += pa * qb.powi(n_top as i32 + 1);
        pa *= qa;
    }
    total.min(1.0)
}

impl TruncationSpec {
    pub fn for_stroke(kind: StrokeKind, n_max: usize, n_a: f64, n_b: f64) -> Self {
        let weights = kind.region_weights();
        Self {
            n_max,
            weights,
            tail_bound: excluded_mass(n_max, weights, n_a, n_b),
            tolerance: LEAKAGE_TOLERANCE,
        }
    }

    /// Smallest region whose excluded Gibbs mass is below `tail`.
    pub fn auto(kind: StrokeKind, n_a: f64, n_b: f64, tail: f64) -> Self {
        let weights = kind.region_weights();
        let mut n_max = 1;
        while excluded_mass(n_max, weights, n_a, n_b) >= tail && n_max < 100_000 {
            n_max += 1;
        }
        Self::for_stroke(kind, n_max, n_a, n_b).with_tolerance(tail.max(LEAKAGE_TOLERANCE))
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn contains(&self, m: i64, n: i64) -> bool {
        m >= 0 && n >= 0 && self.weights.0 as i64 * m + self.weights.1 as i64 * n <= self.n_max as i64
    }
}

#[derive(Debug, Clone)]
pub enum BlockUnitary {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl BlockUnitary {
    pub fn amplitude(&self, row: usize, col: usize) -> Complex64 {
        match self {
            Self::Real(u) => u[(row, col)].into(),
            Self::Complex(u) => u[(row, col)],
        }
    }

    pub fn probability(&self, row: usize, col: usize) -> f64 {
        match self {
            Self::Real(u) => u[(row, col)] * u[(row, col)],
            Self::Complex(u) => u[(row, col)].norm_sqr(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Real(u) => u.nrows(),
            Self::Complex(u) => u.nrows(),
        }
    }
}

/// One invariant block of the truncated stroke.
#[derive(Debug, Clone)]
pub struct Block {
    pub states: Vec<(u32, u32)>,
    /// States the generator couples to something outside the region.
    pub boundary: Vec<bool>,
    pub unitary: BlockUnitary,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// `<k - down + up| (x^dag)^up x^down |k>`.
fn ladder(k: u32, down: u32, up: u32) -> Option<f64> {
    if k < down {
        return None;
    }
    let base = k - down;
    let mut sq = 1.0;
    for i in base + 1..=k {
        sq *= i as f64;
    }
    for i in base + 1..=base + up {
        sq *= i as f64;
    }
    Some(sq.sqrt())
}

/// Region states grouped into the connected components of the generator.
struct Layout {
    states: Vec<(u32, u32)>,
    components: Vec<Vec<usize>>,
    boundary: Vec<bool>,
    // (source, target, amplitude of T) with both ends in the region.
    couplings: Vec<Vec<(usize, usize, f64)>>,
}

impl Layout {
    fn new(kind: StrokeKind, trunc: &TruncationSpec) -> Result<Self> {
        if trunc.n_max < 1 {
            return domain("n_max must be >= 1");
        }
        let mut states = Vec::new();
        let mut index = HashMap::new();
        let (wa, wb) = trunc.weights;
        for m in 0..=(trunc.n_max as u32 / wa) {
            for n in 0..=((trunc.n_max as u32 - wa * m) / wb) {
                index.insert((m, n), states.len());
                states.push((m, n));
            }
        }
        let mono = kind.monomial();
        let mut parent: Vec<usize> = (0..states.len()).collect();
        let mut boundary = vec![false; states.len()];
        let mut edges = Vec::new();
        for (src, &(m, n)) in states.iter().enumerate() {
            let Some(amp) = ladder(m, mono.a_down, mono.a_up)
                .zip(ladder(n, mono.b_down, mono.b_up))
                .map(|(x, y)| x * y)
            else {
                continue;
            };
            let tm = (m - mono.a_down + mono.a_up) as i64;
            let tn = (n - mono.b_down + mono.b_up) as i64;
            if !trunc.contains(tm, tn) {
                boundary[src] = true;
                continue;
            }
            let dst = index[&(tm as u32, tn as u32)];
            edges.push((src, dst, amp));
            let (ra, rb) = (find(&mut parent, src), find(&mut parent, dst));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..states.len() {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        let mut component_of = vec![0; states.len()];
        let components: Vec<Vec<usize>> = groups.into_values().collect();
        for (c, members) in components.iter().enumerate() {
            for &i in members {
                component_of[i] = c;
            }
        }
        let mut couplings = vec![Vec::new(); components.len()];
        for (src, dst, amp) in edges {
            couplings[component_of[src]].push((src, dst, amp));
        }
        Ok(Self {
            states,
            components,
            boundary,
            couplings,
        })
    }

    fn block(&self, c: usize, coupling: Complex64) -> Block {
        let members = &self.components[c];
        let local: HashMap<usize, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let dim = members.len();
        let unitary = if coupling.im == 0.0 {
            let mut g = DMatrix::<f64>::zeros(dim, dim);
            for &(src, dst, amp) in &self.couplings[c] {
                let (j, i) = (local[&src], local[&dst]);
                g[(i, j)] += coupling.re * amp;
                g[(j, i)] -= coupling.re * amp;
            }
            BlockUnitary::Real(g.exp())
        } else {
            let mut g = DMatrix::<Complex64>::zeros(dim, dim);
            for &(src, dst, amp) in &self.couplings[c] {
                let (j, i) = (local[&src], local[&dst]);
                g[(i, j)] += coupling * amp;
                g[(j, i)] -= coupling.conj() * amp;
            }
            BlockUnitary::Complex(g.exp())
        };
        Block {
            states: members.iter().map(|&i| self.states[i]).collect(),
            boundary: members.iter().map(|&i| self.boundary[i]).collect(),
            unitary,
        }
    }

    fn blocks(&self, coupling: Complex64) -> impl Iterator<Item = Block> + '_ {
        (0..self.components.len()).map(move |c| self.block(c, coupling))
    }
}

/// The stroke on the truncated region, block by block.
#[derive(Debug, Clone)]
pub struct Stroke {
    pub kind: StrokeKind,
    pub blocks: Vec<Block>,
    position: HashMap<(u32, u32), (usize, usize)>,
}

impl Stroke {
    /// `<final| U |initial>`; zero across blocks or outside the region.
    pub fn amplitude(&self, final_state: (u32, u32), initial: (u32, u32)) -> Complex64 {
        match (self.position.get(&final_state), self.position.get(&initial)) {
            (Some(&(bf, i)), Some(&(bi, j))) if bf == bi => self.blocks[bf].unitary.amplitude(i, j),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Largest `|1 - column norm|` over states away from the boundary.
    pub fn interior_unitarity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for block in &self.blocks {
            if block.boundary.iter().any(|&b| b) {
                continue;
            }
            for j in 0..block.states.len() {
                let norm: f64 = (0..block.states.len()).map(|i| block.unitary.probability(i, j)).sum();
                worst = worst.max((norm - 1.0).abs());
            }
        }
        worst
    }
}

pub fn build_stroke(kind: StrokeKind, trunc: &TruncationSpec) -> Result<Stroke> {
    let layout = Layout::new(kind, trunc)?;
    let blocks: Vec<Block> = layout.blocks(kind.coupling()).collect();
    let mut position = HashMap::new();
    for (b, block) in blocks.iter().enumerate() {
        for (k, &s) in block.states.iter().enumerate() {
            position.insert(s, (b, k));
        }
    }
    Ok(Stroke {
        kind,
        blocks,
        position,
    })
}

/// `ln p(k)` for a Bose-Gibbs state of mean occupation `n`.
fn log_gibbs(n: f64, k: u32) -> f64 {
    if n == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -n.ln_1p() - k as f64 * (1.0 / n).ln_1p()
}

/// Joint law of the energy-level changes `(dm, dn)` of the two modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockOracleResult {
    pub joint: BTreeMap<(i64, i64), f64>,
    pub omega_a: f64,
    pub omega_b: f64,
    /// Gibbs mass of initial states outside the region.
    pub tail_bound: f64,
    /// Probability of ending on a state whose couplings leave the region.
    pub leakage: f64,
}

impl FockOracleResult {
    pub fn total_mass(&self) -> f64 {
        self.joint.values().sum()
    }

    /// `W = dE_a + dE_b`
    pub fn work(&self, dm: i64, dn: i64) -> f64 {
        self.omega_a * dm as f64 + self.omega_b * dn as f64
    }

    /// `Q_H = -dE_a`
    pub fn heat_hot(&self, dm: i64) -> f64 {
        -self.omega_a * dm as f64
    }

    /// `Q_C = -dE_b`
    pub fn heat_cold(&self, dn: i64) -> f64 {
        -self.omega_b * dn as f64
    }

    pub fn moments(&self) -> Moments {
        let (mut w1, mut q1, mut w2, mut q2, mut wq) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&(dm, dn), &p) in &self.joint {
            let w = self.work(dm, dn);
            let q = self.heat_hot(dm);
            w1 += p * w;
            q1 += p * q;
            w2 += p * w * w;
            q2 += p * q * q;
            wq += p * w * q;
        }
        Moments {
            mean_w: w1,
            mean_qh: q1,
            mean_qc: -w1 - q1,
            var_w: w2 - w1 * w1,
            var_qh: q2 - q1 * q1,
            cov_w_qh: wq - w1 * q1,
        }
    }

    /// `<beta_a dE_a + beta_b dE_b>`
    pub fn entropy_production(&self, beta_a: f64, beta_b: f64) -> f64 {
        self.joint
            .iter()
            .map(|(&(dm, dn), &p)| p * (beta_a * self.omega_a * dm as f64 + beta_b * self.omega_b * dn as f64))
            .sum()
    }

    /// Mass off the line `c_a dm + c_b dn = 0`.
    pub fn off_support_mass(&self, c_a: i64, c_b: i64) -> f64 {
        self.joint
            .iter()
            .filter(|(&(dm, dn), _)| c_a * dm + c_b * dn != 0)
            .fold(0.0, |acc, (_, &p)| acc + p)
    }

    /// Law of the heat index `n = -dm`, so that `Q_H = n w_a`.
    pub fn heat_index_marginal(&self) -> BTreeMap<i64, f64> {
        let mut out = BTreeMap::new();
        for (&(dm, _), &p) in &self.joint {
            *out.entry(-dm).or_insert(0.0) += p;
        }
        out
    }

    /// Total variation distance between the heat-index marginal and `pmf`.
    pub fn total_variation(&self, pmf: &WorkHeatPmf) -> f64 {
        let marginal = self.heat_index_marginal();
        let cut = pmf.support_cut(1e-18);
        let mut keys: Vec<i64> = marginal.keys().copied().collect();
        keys.extend(-cut..=cut);
        keys.sort_unstable();
        keys.dedup();
        0.5 * keys
            .iter()
            .map(|n| (marginal.get(n).copied().unwrap_or(0.0) - pmf.prob(*n)).abs())
            .sum::<f64>()
    }

    /// `sum p exp(i lambda W + i mu Q_H)`; complex arguments allowed.
    pub fn char_fn(&self, lambda: Complex64, mu: Complex64) -> Complex64 {
        self.joint
            .iter()
            .map(|(&(dm, dn), &p)| p * (Complex64::i() * (lambda * self.work(dm, dn) + mu * self.heat_hot(dm))).exp())
            .sum()
    }

    pub fn to_table(&self) -> Table {
        let mut table = Table::new(["delta_m", "delta_n", "w", "q_h", "probability", "tail_bound"]);
        for (&(dm, dn), &p) in &self.joint {
            table.push(vec![
                dm.to_string(),
                dn.to_string(),
                fmt_f64(self.work(dm, dn)),
                fmt_f64(self.heat_hot(dm)),
                fmt_f64(p),
                fmt_f64(self.tail_bound),
            ]);
        }
        table
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.to_table().write_to(out)
    }
}

fn check_occupations(n_a: f64, n_b: f64) -> Result<()> {
    if !(n_a >= 0.0 && n_b >= 0.0 && n_a.is_finite() && n_b.is_finite()) {
        return domain(format!("occupations must be finite and >= 0 (n_a = {n_a}, n_b = {n_b})"));
    }
    Ok(())
}

fn refuse_tail(kind: StrokeKind, trunc: &TruncationSpec, n_a: f64, n_b: f64) -> Result<()> {
    if trunc.tail_bound > trunc.tolerance {
        let suggested = TruncationSpec::auto(kind, n_a, n_b, trunc.tolerance).n_max;
        return Err(Error::TruncationTooSmall {
            n_max: trunc.n_max,
            suggested,
            reason: format!("excluded Gibbs mass {:.3e} exceeds {:.1e}", trunc.tail_bound, trunc.tolerance),
        });
    }
    Ok(())
}

/// Two-point-measurement joint law of `(dm, dn)` for thermal inputs with
/// occupations `n_a`, `n_b`.
///
/// Refuses when the excluded Gibbs mass or the population reaching the edge
/// of the region exceeds `trunc.tolerance`.
pub fn joint_distribution(
    kind: StrokeKind,
    n_a: f64,
    n_b: f64,
    omega_a: f64,
    omega_b: f64,
    trunc: &TruncationSpec,
) -> Result<FockOracleResult> {
    check_occupations(n_a, n_b)?;
    let trunc = TruncationSpec {
        tail_bound: excluded_mass(trunc.n_max, trunc.weights, n_a, n_b),
        ..*trunc
    };
    refuse_tail(kind, &trunc, n_a, n_b)?;
    let layout = Layout::new(kind, &trunc)?;
    let mut joint = BTreeMap::new();
    let mut leakage = 0.0;
    for block in layout.blocks(kind.coupling()) {
        for (j, &(m, n)) in block.states.iter().enumerate() {
            let w = (log_gibbs(n_a, m) + log_gibbs(n_b, n)).exp();
            if w == 0.0 {
                continue;
            }
            for (i, &(m2, n2)) in block.states.iter().enumerate() {
                let p = w * block.unitary.probability(i, j);
                if p == 0.0 {
                    continue;
                }
                if block.boundary[i] {
                    leakage += p;
                }
                *joint.entry((m2 as i64 - m as i64, n2 as i64 - n as i64)).or_insert(0.0) += p;
            }
        }
    }
    if leakage > trunc.tolerance {
        return Err(Error::TruncationTooSmall {
            n_max: trunc.n_max,
            suggested: 2 * trunc.n_max,
            reason: format!("population {leakage:.3e} reaches the edge of the region"),
        });
    }
    Ok(FockOracleResult {
        joint,
        omega_a,
        omega_b,
        tail_bound: trunc.tail_bound,
        leakage,
    })
}

/// Characteristic function from the enumerated joint law.
#[allow(clippy::too_many_arguments)]
pub fn char_fn_oracle(
    kind: StrokeKind,
    n_a: f64,
    n_b: f64,
    omega_a: f64,
    omega_b: f64,
    lambda: Complex64,
    mu: Complex64,
    trunc: &TruncationSpec,
) -> Result<Complex64> {
    Ok(joint_distribution(kind, n_a, n_b, omega_a, omega_b, trunc)?.char_fn(lambda, mu))
}

/// Beam-splitter characteristic function as `Tr[U_theta^dag U_xi rho_0]`
/// with the rotated coupling `xi = theta exp(i(lambda (w_a - w_b) - mu w_a))`.
#[allow(clippy::too_many_arguments)]
pub fn char_fn_trace_route(
    theta: f64,
    n_a: f64,
    n_b: f64,
    omega_a: f64,
    omega_b: f64,
    lambda: f64,
    mu: f64,
    trunc: &TruncationSpec,
) -> Result<Complex64> {
    check_occupations(n_a, n_b)?;
    let kind = StrokeKind::beam_splitter(theta);
    let trunc = TruncationSpec {
        tail_bound: excluded_mass(trunc.n_max, trunc.weights, n_a, n_b),
        ..*trunc
    };
    refuse_tail(kind, &trunc, n_a, n_b)?;
    let layout = Layout::new(kind, &trunc)?;
    let xi = Complex64::from_polar(theta, lambda * (omega_a - omega_b) - mu * omega_a);
    let mut total = Complex64::new(0.0, 0.0);
    for (plain, rotated) in layout.blocks(theta.into()).zip(layout.blocks(xi)) {
        for (j, &(m, n)) in plain.states.iter().enumerate() {
            let w = (log_gibbs(n_a, m) + log_gibbs(n_b, n)).exp();
            if w == 0.0 {
                continue;
            }
            let diag: Complex64 = (0..plain.states.len())
                .map(|i| plain.unitary.amplitude(i, j).conj() * rotated.unitary.amplitude(i, j))
                .sum();
            total += w * diag;
        }
    }
    Ok(total)
}
