//! Admissibility graphs, transition matrices, tree shapes and boundary-law
//! vectors for four-state hard-core models.
//!
//! States are `0..4`. State `0` is always the normalisation reference: a
//! boundary law is stored as the three ratios `z_i = t_i / t_0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of spin values.
pub const STATES: usize = 4;

/// Row sums and simplex constraints are checked to this tolerance.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A directed graph on the four states listing the allowed ordered pairs
/// `(parent state, child state)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AdmissibilityGraph {
    adj: [[bool; STATES]; STATES],
}

impl AdmissibilityGraph {
    /// Builds a graph from a list of directed edges.
    ///
    /// Every state must have at least one incoming and one outgoing edge.
    pub fn new<I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = [[false; STATES]; STATES];
        for (i, j) in edges {
            if i >= STATES || j >= STATES {
                return Err(Error::InvalidGraph(format!("edge ({i}, {j}) leaves the state set")));
            }
            adj[i][j] = true;
        }
        Self::from_adjacency(adj)
    }

    /// Builds the graph closed under pair reversal: `(i, j)` present implies
    /// `(j, i)` present.
    pub fn undirected<I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let edges: Vec<_> = edges.into_iter().collect();
        let reversed: Vec<_> = edges.iter().map(|&(i, j)| (j, i)).collect();
        Self::new(edges.into_iter().chain(reversed))
    }

    pub fn from_adjacency(adj: [[bool; STATES]; STATES]) -> Result<Self> {
        let graph = Self { adj };
        for v in 0..STATES {
            if graph.out_degree(v) == 0 {
                return Err(Error::InvalidGraph(format!("state {v} has outdegree 0")));
            }
            if graph.in_degree(v) == 0 {
                return Err(Error::InvalidGraph(format!("state {v} has indegree 0")));
            }
        }
        Ok(graph)
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&e| e).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        (0..STATES).filter(|&u| self.adj[u][v]).count()
    }

    pub fn out_degrees(&self) -> [usize; STATES] {
        std::array::from_fn(|v| self.out_degree(v))
    }

    /// Successor states of `v`, in increasing order.
    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..STATES).filter(move |&j| self.adj[v][j])
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..STATES)
            .flat_map(|i| (0..STATES).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adj[i][j])
            .collect()
    }

    pub fn adjacency(&self) -> &[[bool; STATES]; STATES] {
        &self.adj
    }
}

/// The four graphs analysed by this crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Diamond,
    Stick,
    Gun,
    Key,
}

impl Model {
    pub const ALL: [Model; 4] = [Model::Diamond, Model::Stick, Model::Gun, Model::Key];

    pub fn name(self) -> &'static str {
        match self {
            Model::Diamond => "diamond",
            Model::Stick => "stick",
            Model::Gun => "gun",
            Model::Key => "key",
        }
    }

    pub fn graph(self) -> AdmissibilityGraph {
        let graph = match self {
            Model::Diamond => AdmissibilityGraph::new([
                (0, 0),
                (0, 2),
                (1, 0),
                (1, 2),
                (2, 1),
                (2, 3),
                (3, 1),
                (3, 3),
            ]),
            Model::Stick => AdmissibilityGraph::undirected([(0, 1), (0, 3), (2, 3)]),
            Model::Gun => AdmissibilityGraph::undirected([(0, 0), (0, 1), (0, 2), (0, 3), (1, 2)]),
            Model::Key => AdmissibilityGraph::undirected([(0, 1), (0, 2), (0, 3), (1, 2)]),
        };
        graph.expect("catalog graphs have positive in- and outdegrees")
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "diamond" => Ok(Model::Diamond),
            "stick" => Ok(Model::Stick),
            "gun" => Ok(Model::Gun),
            "key" => Ok(Model::Key),
            _ => Err(Error::UnknownModel(s.to_string())),
        }
    }
}

/// Looks up a catalog graph by name.
pub fn builtin_graph(name: &str) -> Result<AdmissibilityGraph> {
    name.parse::<Model>().map(Model::graph)
}

/// Parameters of a catalog model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    Diamond { alpha: f64, beta: f64 },
    Stick { alpha: f64, beta: f64 },
    Gun { alpha: f64, beta: f64, a: f64, b: f64, c: f64, d: f64 },
    Key { alpha: f64, beta: f64, a: f64, b: f64, c: f64 },
}

impl ModelParams {
    pub fn model(&self) -> Model {
        match self {
            ModelParams::Diamond { .. } => Model::Diamond,
            ModelParams::Stick { .. } => Model::Stick,
            ModelParams::Gun { .. } => Model::Gun,
            ModelParams::Key { .. } => Model::Key,
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            ModelParams::Diamond { alpha, .. }
            | ModelParams::Stick { alpha, .. }
            | ModelParams::Gun { alpha, .. }
            | ModelParams::Key { alpha, .. } => alpha,
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            ModelParams::Diamond { beta, .. }
            | ModelParams::Stick { beta, .. }
            | ModelParams::Gun { beta, .. }
            | ModelParams::Key { beta, .. } => beta,
        }
    }

    /// Checks open-interval and simplex constraints for the model.
    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, value: f64| {
            if value > 0.0 && value < 1.0 {
                Ok(())
            } else {
                Err(Error::ParameterRange { name, value })
            }
        };
        match *self {
            ModelParams::Diamond { alpha, beta } | ModelParams::Stick { alpha, beta } => {
                check("alpha", alpha)?;
                check("beta", beta)
            }
            ModelParams::Gun { alpha, beta, a, b, c, d } => {
                check("alpha", alpha)?;
                check("beta", beta)?;
                check("a", a)?;
                check("b", b)?;
                check("c", c)?;
                check("d", d)?;
                check_simplex(a + b + c + d)
            }
            ModelParams::Key { alpha, beta, a, b, c } => {
                check("alpha", alpha)?;
                check("beta", beta)?;
                check("a", a)?;
                check("b", b)?;
                check("c", c)?;
                check_simplex(a + b + c)
            }
        }
    }
}

fn check_simplex(sum: f64) -> Result<()> {
    if (sum - 1.0).abs() <= SIMPLEX_TOL {
        Ok(())
    } else {
        Err(Error::Simplex { sum })
    }
}

/// Builds the transition matrix of a catalog model and checks that its
/// support is exactly the model's admissibility graph.
///
/// The stick, gun and key rows are those whose ratios reproduce the
/// recursions written out for these graphs; row 0 is the common
/// denominator.
pub fn build_matrix(params: &ModelParams) -> Result<TransitionMatrix> {
    params.validate()?;
    let p = match *params {
        ModelParams::Diamond { alpha, beta } => [
            [alpha, 0.0, 1.0 - alpha, 0.0],
            [beta, 0.0, 1.0 - beta, 0.0],
            [0.0, 1.0 - beta, 0.0, beta],
            [0.0, 1.0 - alpha, 0.0, alpha],
        ],
        ModelParams::Stick { alpha, beta } => [
            [0.0, alpha, 0.0, 1.0 - alpha],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [beta, 0.0, 1.0 - beta, 0.0],
        ],
        ModelParams::Gun { alpha, beta, a, b, c, d } => gun_rows(alpha, beta, a, b, c, d),
        ModelParams::Key { alpha, beta, a, b, c } => gun_rows(alpha, beta, a, b, c, 0.0),
    };
    TransitionMatrix::with_graph(p, &params.model().graph())
}

fn gun_rows(alpha: f64, beta: f64, a: f64, b: f64, c: f64, d: f64) -> [[f64; 4]; 4] {
    [
        [d, a, b, c],
        [alpha, 0.0, 1.0 - alpha, 0.0],
        [beta, 1.0 - beta, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ]
}

/// A row-stochastic 4x4 matrix. Serialises as a JSON array of four rows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 4]; 4]", into = "[[f64; 4]; 4]")]
pub struct TransitionMatrix {
    p: [[f64; STATES]; STATES],
}

impl TransitionMatrix {
    pub fn new(p: [[f64; STATES]; STATES]) -> Result<Self> {
        for (row, entries) in p.iter().enumerate() {
            for (col, &value) in entries.iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::MatrixEntry { row, col, value });
                }
            }
            let sum: f64 = entries.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::RowSum { row, sum });
            }
        }
        Ok(Self { p })
    }

    /// Like [`TransitionMatrix::new`], additionally requiring that the
    /// positive entries are exactly the edges of `graph`.
    pub fn with_graph(p: [[f64; STATES]; STATES], graph: &AdmissibilityGraph) -> Result<Self> {
        let m = Self::new(p)?;
        for i in 0..STATES {
            for j in 0..STATES {
                if (m.p[i][j] > 0.0) != graph.contains(i, j) {
                    return Err(Error::SupportMismatch(i, j));
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i][j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64; STATES] {
        &self.p[i]
    }

    pub fn rows(&self) -> &[[f64; STATES]; STATES] {
        &self.p
    }

    /// Positive-entry pattern.
    pub fn support(&self) -> [[bool; STATES]; STATES] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.p[i][j] > 0.0))
    }

    /// The admissibility graph carried by the support, if it is a valid one.
    pub fn support_graph(&self) -> Result<AdmissibilityGraph> {
        AdmissibilityGraph::from_adjacency(self.support())
    }
}

impl TryFrom<[[f64; 4]; 4]> for TransitionMatrix {
    type Error = Error;

    fn try_from(p: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(p)
    }
}

impl From<TransitionMatrix> for [[f64; 4]; 4] {
    fn from(m: TransitionMatrix) -> Self {
        m.p
    }
}

/// Number of children of the root of a finite tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootBranching {
    /// Root has `k` children, like every other vertex (rooted half-tree).
    HalfTree,
    /// Root has `k + 1` children (ball in the full Cayley tree).
    #[default]
    FullTree,
}

impl RootBranching {
    pub fn branching(self, k: usize) -> usize {
        match self {
            RootBranching::HalfTree => k,
            RootBranching::FullTree => k + 1,
        }
    }
}

/// Shape of the ball `V_n` of radius `depth` around the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeShape {
    pub k: usize,
    pub depth: usize,
    pub root: RootBranching,
}

impl TreeShape {
    pub fn new(k: usize, depth: usize, root: RootBranching) -> Result<Self> {
        if k == 0 {
            return Err(Error::Shape("branching order k must be at least 1".into()));
        }
        Ok(Self { k, depth, root })
    }

    pub fn root_branching(&self) -> usize {
        self.root.branching(self.k)
    }

    /// Number of vertices on each sphere `W_0, ..., W_n`.
    pub fn level_sizes(&self) -> Vec<u128> {
        let mut sizes = Vec::with_capacity(self.depth + 1);
        sizes.push(1u128);
        let mut current = self.root_branching() as u128;
        for _ in 1..=self.depth {
            sizes.push(current);
            current = current.saturating_mul(self.k as u128);
        }
        sizes
    }

    pub fn vertex_count(&self) -> u128 {
        self.level_sizes().iter().fold(0u128, |acc, &s| acc.saturating_add(s))
    }

    /// Same tree, one level shallower.
    pub fn shallower(&self) -> Option<Self> {
        self.depth.checked_sub(1).map(|depth| Self { depth, ..*self })
    }
}

/// A boundary law `(z_1, z_2, z_3)` with all components finite and positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct FieldVector([f64; 3]);

impl FieldVector {
    pub fn new(z: [f64; 3]) -> Result<Self> {
        if z.iter().all(|x| x.is_finite() && *x > 0.0) {
            Ok(Self(z))
        } else {
            Err(Error::InvalidField(z))
        }
    }

    pub fn ones() -> Self {
        Self([1.0; 3])
    }

    /// Builds the vector from its log image `h_i = ln z_i`.
    pub fn from_ln(h: [f64; 3]) -> Result<Self> {
        Self::new(h.map(f64::exp))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    /// Component `i` for `i` in `1..=3`.
    pub fn z(&self, i: usize) -> f64 {
        self.0[i - 1]
    }

    pub fn ln(&self) -> [f64; 3] {
        self.0.map(f64::ln)
    }

    /// Boundary weights `(1, z_1, z_2, z_3)` with the reference state first.
    pub fn weights(&self) -> [f64; 4] {
        [1.0, self.0[0], self.0[1], self.0[2]]
    }

    /// Largest `|ln z_i|`; zero exactly at the trivial law.
    pub fn log_norm(&self) -> f64 {
        self.ln().iter().fold(0.0_f64, |m, h| m.max(h.abs()))
    }
}

impl TryFrom<[f64; 3]> for FieldVector {
    type Error = Error;

    fn try_from(z: [f64; 3]) -> Result<Self> {
        Self::new(z)
    }
}

impl From<FieldVector> for [f64; 3] {
    fn from(z: FieldVector) -> Self {
        z.0
    }
}
