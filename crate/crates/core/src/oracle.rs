//! Exact finite-volume measures on small trees.
//!
//! On the ball `V_n` the measure of an admissible configuration is the
//! product of `P[σ(x)][σ(y)]` over edges (parent `x`, child `y`) times the
//! boundary weights `t_{σ(x), x}` over the sphere `W_n`, normalised by
//! `Z_n`. Summing out `W_n` must reproduce the depth `n - 1` measure when
//! the boundary weights come from a solution of the recursion.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AdmissibilityGraph, FieldVector, TransitionMatrix, TreeShape, STATES};

/// Default cap on the number of admissible configurations enumerated.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// Above this many vertices weights are accumulated as logarithms.
const LOG_SPACE_VERTICES: usize = 12;

/// The ball `V_n` with vertices numbered level by level from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTree {
    shape: TreeShape,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl FiniteTree {
    /// Fails if the vertex count does not fit in memory-sized indices.
    pub fn new(shape: TreeShape) -> Result<Self> {
        let count = shape.vertex_count();
        if count > (1u128 << 26) {
            return Err(Error::Budget { count, budget: 1 << 26 });
        }
        let mut parent = vec![None];
        let mut children = vec![Vec::new()];
        let mut depth = vec![0];
        let mut level = vec![0usize];
        for d in 1..=shape.depth {
            let mut next = Vec::new();
            for &x in &level {
                let branching = if d == 1 { shape.root_branching() } else { shape.k };
                for _ in 0..branching {
                    let y = parent.len();
                    parent.push(Some(x));
                    children.push(Vec::new());
                    depth.push(d);
                    children[x].push(y);
                    next.push(y);
                }
            }
            level = next;
        }
        Ok(Self { shape, parent, children, depth })
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    pub fn children(&self, x: usize) -> &[usize] {
        &self.children[x]
    }

    pub fn depth_of(&self, x: usize) -> usize {
        self.depth[x]
    }

    /// The sphere `W_n`.
    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.shape.depth;
        (0..self.len()).filter(move |&x| self.depth[x] == n)
    }

    /// `(parent, child)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).filter_map(|y| self.parent[y].map(|x| (x, y)))
    }
}

/// Number of admissible configurations, by dynamic programming over levels.
/// Saturates at `u128::MAX`.
pub fn transfer_count(tree: &FiniteTree, graph: &AdmissibilityGraph) -> u128 {
    // ways[d][s]: extensions of the subtree below a depth-d vertex in state s.
    let n = tree.shape().depth;
    let mut below = [1u128; STATES];
    for d in (0..n).rev() {
        let branching = if d == 0 { tree.shape().root_branching() } else { tree.shape().k };
        let mut here = [0u128; STATES];
        for (s, h) in here.iter_mut().enumerate() {
            let per_child = graph.successors(s).fold(0u128, |acc, t| acc.saturating_add(below[t]));
            *h = (0..branching).fold(1u128, |acc, _| acc.saturating_mul(per_child));
        }
        below = here;
    }
    below.iter().fold(0u128, |acc, &x| acc.saturating_add(x))
}

/// Lazily enumerates admissible configurations in lexicographic order
/// (vertex order is level order), extending only admissible prefixes.
pub struct AdmissibleIter<'a> {
    tree: &'a FiniteTree,
    graph: AdmissibilityGraph,
    config: Vec<u8>,
    fresh: bool,
    done: bool,
}

impl Iterator for AdmissibleIter<'_> {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        if self.done {
            return None;
        }
        let n = self.config.len();
        let (mut pos, mut trial) = if self.fresh {
            self.fresh = false;
            (0, 0u8)
        } else {
            (n - 1, self.config[n - 1] + 1)
        };
        loop {
            let found = (trial..STATES as u8).find(|&s| match self.tree.parent(pos) {
                None => true,
                Some(x) => self.graph.contains(self.config[x] as usize, s as usize),
            });
            match found {
                Some(s) => {
                    self.config[pos] = s;
                    if pos + 1 == n {
                        return Some(self.config.clone());
                    }
                    pos += 1;
                    trial = 0;
                }
                None if pos == 0 => {
                    self.done = true;
                    return None;
                }
                None => {
                    pos -= 1;
                    trial = self.config[pos] + 1;
                }
            }
        }
    }
}

/// Admissible configurations on `tree`, or a budget error carrying the
/// exact count.
///
/// ```
/// use cayley_hc::model::{Model, RootBranching, TreeShape};
/// use cayley_hc::oracle::{enumerate_admissible, FiniteTree, DEFAULT_BUDGET};
/// let tree = FiniteTree::new(TreeShape::new(2, 1, RootBranching::HalfTree).unwrap()).unwrap();
/// let n = enumerate_admissible(&tree, &Model::Diamond.graph(), DEFAULT_BUDGET).unwrap().count();
/// assert_eq!(n, 16);
/// ```
pub fn enumerate_admissible<'a>(
    tree: &'a FiniteTree,
    graph: &AdmissibilityGraph,
    budget: u128,
) -> Result<AdmissibleIter<'a>> {
    let count = transfer_count(tree, graph);
    if count > budget {
        return Err(Error::Budget { count, budget });
    }
    Ok(AdmissibleIter { tree, graph: *graph, config: vec![0; tree.len()], fresh: true, done: false })
}

/// How boundary weights are derived from a boundary law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum BoundaryField {
    /// `t = (1, z_1, z_2, z_3)` on every sphere.
    Constant(FieldVector),
    /// `even` on spheres at even distance from the root, `odd` otherwise.
    Periodic { even: FieldVector, odd: FieldVector },
}

impl BoundaryField {
    pub fn at_depth(&self, depth: usize) -> FieldVector {
        match *self {
            Self::Constant(z) => z,
            Self::Periodic { even, odd } => {
                if depth.is_multiple_of(2) {
                    even
                } else {
                    odd
                }
            }
        }
    }
}

/// A transition matrix plus boundary weights on the leaves of a tree.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMeasureSpec {
    pub p: TransitionMatrix,
    pub boundary: BTreeMap<usize, [f64; STATES]>,
}

impl FiniteMeasureSpec {
    pub fn from_field(p: &TransitionMatrix, tree: &FiniteTree, field: &BoundaryField) -> Self {
        let t = field.at_depth(tree.shape().depth).weights();
        Self { p: *p, boundary: tree.leaves().map(|x| (x, t)).collect() }
    }

    pub fn constant(p: &TransitionMatrix, tree: &FiniteTree, z: FieldVector) -> Self {
        Self::from_field(p, tree, &BoundaryField::Constant(z))
    }

    /// Copy with `t[state]` at `leaf` multiplied by `factor`.
    pub fn perturbed(&self, leaf: usize, state: usize, factor: f64) -> Self {
        let mut out = self.clone();
        if let Some(t) = out.boundary.get_mut(&leaf) {
            t[state] *= factor;
        }
        out
    }

    fn check(&self, tree: &FiniteTree) -> Result<()> {
        for x in tree.leaves() {
            let Some(t) = self.boundary.get(&x) else {
                return Err(Error::Shape(format!("no boundary weights for leaf {x}")));
            };
            if t.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(Error::Shape(format!("invalid boundary weights {t:?} at leaf {x}")));
            }
        }
        Ok(())
    }
}

/// Normalised probabilities of every admissible configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureTable {
    pub configs: Vec<Vec<u8>>,
    pub probs: Vec<f64>,
}

impl MeasureTable {
    /// One row per configuration: the states in vertex order, then the
    /// probability.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.configs.first().map_or(0, Vec::len);
        let header: Vec<String> = (0..n).map(|x| format!("s{x}")).chain(["probability".into()]).collect();
        writeln!(out, "{}", header.join(","))?;
        for (c, p) in self.configs.iter().zip(&self.probs) {
            let states: Vec<String> = c.iter().map(u8::to_string).collect();
            writeln!(out, "{},{:.16e}", states.join(","), p)?;
        }
        Ok(())
    }
}

/// Neumaier-compensated sum; the tables hold up to millions of terms.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let (mut sum, mut c) = (0.0_f64, 0.0_f64);
    for x in xs {
        let t = sum + x;
        c += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + c
}

impl MeasureTable {
    pub fn total(&self) -> f64 {
        compensated_sum(self.probs.iter().copied())
    }
}

/// The depth-`n` measure on `tree`.
pub fn finite_measure(spec: &FiniteMeasureSpec, tree: &FiniteTree, budget: u128) -> Result<MeasureTable> {
    spec.check(tree)?;
    let graph = spec.p.support_graph()?;
    let leaves: Vec<usize> = tree.leaves().collect();
    let edges: Vec<(usize, usize)> = tree.edges().collect();
    let log_space = tree.len() > LOG_SPACE_VERTICES;
    let mut configs = Vec::new();
    let mut weights = Vec::new();
    for c in enumerate_admissible(tree, &graph, budget)? {
        let w = if log_space {
            edges.iter().map(|&(x, y)| spec.p.get(c[x] as usize, c[y] as usize).ln()).sum::<f64>()
                + leaves.iter().map(|x| spec.boundary[x][c[*x] as usize].ln()).sum::<f64>()
        } else {
            edges.iter().map(|&(x, y)| spec.p.get(c[x] as usize, c[y] as usize)).product::<f64>()
                * leaves.iter().map(|x| spec.boundary[x][c[*x] as usize]).product::<f64>()
        };
        configs.push(c);
        weights.push(w);
    }
    let probs = if log_space {
        let m = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !m.is_finite() {
            return Err(Error::DegenerateMeasure);
        }
        let e: Vec<f64> = weights.iter().map(|w| (w - m).exp()).collect();
        let z = compensated_sum(e.iter().copied());
        e.into_iter().map(|x| x / z).collect()
    } else {
        let z = compensated_sum(weights.iter().copied());
        if !(z > 0.0) {
            return Err(Error::DegenerateMeasure);
        }
        weights.into_iter().map(|w| w / z).collect()
    };
    Ok(MeasureTable { configs, probs })
}

/// Distribution of the root state.
pub fn root_marginal(spec: &FiniteMeasureSpec, tree: &FiniteTree, budget: u128) -> Result<[f64; STATES]> {
    let table = finite_measure(spec, tree, budget)?;
    let mut out = [0.0; STATES];
    for (c, p) in table.configs.iter().zip(&table.probs) {
        out[c[0] as usize] += p;
    }
    Ok(out)
}

/// Largest `|Σ_{ω_n} μ^(n)(σ_{n-1}, ω_n) - μ^(n-1)(σ_{n-1})|` over
/// configurations of the shallower ball.
pub fn compatibility_check_specs(
    deep: (&FiniteMeasureSpec, &FiniteTree),
    shallow: (&FiniteMeasureSpec, &FiniteTree),
    budget: u128,
) -> Result<f64> {
    let (deep_spec, deep_tree) = deep;
    let (shallow_spec, shallow_tree) = shallow;
    if deep_tree.shape().shallower() != Some(shallow_tree.shape()) {
        return Err(Error::Shape(format!(
            "expected depths n and n - 1 of one tree, got {:?} and {:?}",
            deep_tree.shape(),
            shallow_tree.shape()
        )));
    }
    if deep_spec.p != shallow_spec.p {
        return Err(Error::Shape("the two measures use different matrices".into()));
    }
    let prefix = shallow_tree.len();
    let mut marginal: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    let table = finite_measure(deep_spec, deep_tree, budget)?;
    for (c, p) in table.configs.iter().zip(&table.probs) {
        *marginal.entry(c[..prefix].to_vec()).or_insert(0.0) += p;
    }
    let shallow_table = finite_measure(shallow_spec, shallow_tree, budget)?;
    let mut worst = 0.0_f64;
    for (c, p) in shallow_table.configs.iter().zip(&shallow_table.probs) {
        let m = marginal.remove(c).unwrap_or(0.0);
        worst = worst.max((m - p).abs());
    }
    // Prefixes the shallow measure gives zero weight.
    for m in marginal.values() {
        worst = worst.max(m.abs());
    }
    Ok(worst)
}

/// Compatibility residual between depths `n` and `n - 1` of `shape` with
/// boundary weights taken from `field`.
pub fn compatibility_check(
    p: &TransitionMatrix,
    field: &BoundaryField,
    shape: TreeShape,
    budget: u128,
) -> Result<f64> {
    let shallow_shape = shape
        .shallower()
        .ok_or_else(|| Error::Shape("compatibility needs depth n >= 1".into()))?;
    let deep = FiniteTree::new(shape)?;
    let shallow = FiniteTree::new(shallow_shape)?;
    compatibility_check_specs(
        (&FiniteMeasureSpec::from_field(p, &deep, field), &deep),
        (&FiniteMeasureSpec::from_field(p, &shallow, field), &shallow),
        budget,
    )
}

/// Outcome of the two-sided compatibility probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub configurations: u128,
    pub solution_residual: f64,
    /// Largest residual over the four single-component perturbations.
    pub perturbed_residual: f64,
    /// The leaf state whose weight was perturbed to reach it.
    pub perturbed_state: usize,
}

impl VerifyReport {
    pub const SOLUTION_TOL: f64 = 1e-10;
    pub const PERTURBED_MIN: f64 = 1e-4;

    /// Solution fields are compatible and the perturbed ones are not.
    pub fn passed(&self) -> bool {
        self.solution_residual < Self::SOLUTION_TOL && self.perturbed_residual > Self::PERTURBED_MIN
    }
}

/// Runs the compatibility check with the solution field, then with each
/// weight `t_j` at the first deep leaf raised by 10%, keeping the largest
/// perturbed residual. When the measure is nearly concentrated on one
/// state every perturbation moves little mass, so the probe is weakest for
/// extreme fields.
pub fn verify_field(
    p: &TransitionMatrix,
    field: &BoundaryField,
    shape: TreeShape,
    budget: u128,
) -> Result<VerifyReport> {
    let shallow_shape = shape
        .shallower()
        .ok_or_else(|| Error::Shape("verification needs depth n >= 1".into()))?;
    let deep = FiniteTree::new(shape)?;
    let shallow = FiniteTree::new(shallow_shape)?;
    let deep_spec = FiniteMeasureSpec::from_field(p, &deep, field);
    let shallow_spec = FiniteMeasureSpec::from_field(p, &shallow, field);
    let solution_residual =
        compatibility_check_specs((&deep_spec, &deep), (&shallow_spec, &shallow), budget)?;
    let leaf = deep.leaves().next().expect("a ball has leaves");
    let mut perturbed_residual = f64::NEG_INFINITY;
    let mut perturbed_state = 0;
    for state in 0..STATES {
        let bumped = deep_spec.perturbed(leaf, state, 1.1);
        let r = compatibility_check_specs((&bumped, &deep), (&shallow_spec, &shallow), budget)?;
        if r > perturbed_residual {
            perturbed_residual = r;
            perturbed_state = state;
        }
    }
    Ok(VerifyReport {
        configurations: transfer_count(&deep, &p.support_graph()?),
        solution_residual,
        perturbed_residual,
        perturbed_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_matrix, Model, ModelParams, RootBranching};
    use crate::recursion::{multistart_fixed_points, Multistart};

    fn tree(k: usize, n: usize, root: RootBranching) -> FiniteTree {
        FiniteTree::new(TreeShape::new(k, n, root).unwrap()).unwrap()
    }

    fn brute_count(t: &FiniteTree, g: &AdmissibilityGraph) -> usize {
        let n = t.len();
        (0..4usize.pow(n as u32))
            .filter(|code| {
                let c: Vec<usize> = (0..n).map(|x| code / 4usize.pow(x as u32) % 4).collect();
                t.edges().all(|(x, y)| g.contains(c[x], c[y]))
            })
            .count()
    }

    #[test]
    fn tree_layout() {
        let t = tree(2, 2, RootBranching::FullTree);
        assert_eq!(t.len(), 10);
        assert_eq!(t.children(0), &[1, 2, 3]);
        assert_eq!(t.children(1), &[4, 5]);
        assert_eq!(t.leaves().collect::<Vec<_>>(), (4..10).collect::<Vec<_>>());
        assert!((1..t.len()).all(|y| t.parent(y).unwrap() < y));
        let h = tree(3, 2, RootBranching::HalfTree);
        assert_eq!(h.len(), 13);
        assert_eq!(h.depth_of(12), 2);
    }

    #[test]
    fn counts_three_ways() {
        for model in Model::ALL {
            let g = model.graph();
            let t = tree(2, 1, RootBranching::HalfTree);
            let degree_formula: usize = g.out_degrees().iter().map(|d| d * d).sum();
            let listed = enumerate_admissible(&t, &g, DEFAULT_BUDGET).unwrap().count();
            assert_eq!(listed, degree_formula);
            assert_eq!(transfer_count(&t, &g), degree_formula as u128);
            for (k, n, root) in [(2, 2, RootBranching::HalfTree), (1, 3, RootBranching::FullTree), (2, 1, RootBranching::FullTree)] {
                let t = tree(k, n, root);
                let brute = brute_count(&t, &g);
                assert_eq!(enumerate_admissible(&t, &g, DEFAULT_BUDGET).unwrap().count(), brute);
                assert_eq!(transfer_count(&t, &g), brute as u128);
            }
        }
        let t = tree(2, 1, RootBranching::HalfTree);
        assert_eq!(enumerate_admissible(&t, &Model::Diamond.graph(), DEFAULT_BUDGET).unwrap().count(), 16);
        assert_eq!(enumerate_admissible(&t, &Model::Stick.graph(), DEFAULT_BUDGET).unwrap().count(), 10);
        let single = tree(2, 0, RootBranching::FullTree);
        assert_eq!(enumerate_admissible(&single, &Model::Key.graph(), DEFAULT_BUDGET).unwrap().count(), 4);
    }

    #[test]
    fn enumeration_is_admissible_and_distinct() {
        let t = tree(2, 2, RootBranching::FullTree);
        let g = Model::Gun.graph();
        let all: Vec<Vec<u8>> = enumerate_admissible(&t, &g, DEFAULT_BUDGET).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for c in &all {
            assert!(t.edges().all(|(x, y)| g.contains(c[x] as usize, c[y] as usize)));
        }
    }

    #[test]
    fn budget_error_reports_count() {
        let t = tree(3, 3, RootBranching::FullTree);
        match enumerate_admissible(&t, &Model::Diamond.graph(), 1000) {
            Err(Error::Budget { count, budget }) => {
                assert_eq!(budget, 1000);
                assert_eq!(count, transfer_count(&t, &Model::Diamond.graph()));
            }
            _ => panic!("expected a budget error"),
        }
    }

    #[test]
    fn uniform_measure_on_constant_outdegree() {
        let p = TransitionMatrix::new([
            [0.5, 0.0, 0.5, 0.0],
            [0.5, 0.0, 0.5, 0.0],
            [0.0, 0.5, 0.0, 0.5],
            [0.0, 0.5, 0.0, 0.5],
        ])
        .unwrap();
        let t = tree(2, 2, RootBranching::FullTree);
        let table = finite_measure(&FiniteMeasureSpec::constant(&p, &t, FieldVector::ones()), &t, DEFAULT_BUDGET).unwrap();
        let u = 1.0 / table.probs.len() as f64;
        assert!(table.probs.iter().all(|q| (q - u).abs() < 1e-15));
    }

    #[test]
    fn log_space_matches_direct() {
        let p = build_matrix(&ModelParams::Gun { alpha: 0.3, beta: 0.6, a: 0.1, b: 0.2, c: 0.3, d: 0.4 }).unwrap();
        let z = FieldVector::new([0.7, 1.9, 0.4]).unwrap();
        let t = tree(2, 2, RootBranching::HalfTree); // 7 vertices: direct products
        let big = tree(3, 2, RootBranching::HalfTree); // 13 vertices: logs
        for tr in [&t, &big] {
            let spec = FiniteMeasureSpec::constant(&p, tr, z);
            let table = finite_measure(&spec, tr, DEFAULT_BUDGET).unwrap();
            assert!((table.total() - 1.0).abs() < 1e-12);
            let leaves: Vec<usize> = tr.leaves().collect();
            let w = |c: &Vec<u8>| {
                tr.edges().map(|(x, y)| p.get(c[x] as usize, c[y] as usize)).product::<f64>()
                    * leaves.iter().map(|x| z.weights()[c[*x] as usize]).product::<f64>()
            };
            let zsum = compensated_sum(table.configs.iter().map(w));
            for (c, q) in table.configs.iter().zip(&table.probs) {
                assert!((w(c) / zsum - q).abs() <= 1e-12 * q);
            }
        }
    }

    #[test]
    fn root_marginal_examples() {
        let p = build_matrix(&ModelParams::Diamond { alpha: 0.5, beta: 0.5 }).unwrap();
        let single = tree(2, 0, RootBranching::FullTree);
        let m0 = root_marginal(&FiniteMeasureSpec::constant(&p, &single, FieldVector::ones()), &single, DEFAULT_BUDGET).unwrap();
        assert_eq!(m0, [0.25; 4]);
        let t = tree(2, 2, RootBranching::FullTree);
        let m = root_marginal(&FiniteMeasureSpec::constant(&p, &t, FieldVector::ones()), &t, DEFAULT_BUDGET).unwrap();
        assert!((m[0] - m[3]).abs() < 1e-15 && (m[1] - m[2]).abs() < 1e-15);
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_solution_is_compatible_and_perturbation_is_not() {
        let p = build_matrix(&ModelParams::Diamond { alpha: 0.9, beta: 0.1 }).unwrap();
        let roots = multistart_fixed_points(&p, 2, &Multistart::default());
        assert!(roots.len() >= 3);
        let shape = TreeShape::new(2, 2, RootBranching::FullTree).unwrap();
        let mut moderate = 0;
        for z in roots {
            let r = verify_field(&p, &BoundaryField::Constant(z), shape, DEFAULT_BUDGET).unwrap();
            assert!(r.solution_residual < 1e-12, "{z:?}: {r:?}");
            // The two extreme roots put almost all mass on one state; the
            // probe cannot move 1e-4 of it.
            let c = z.components();
            let spread = c.iter().chain([&1.0]).fold(1.0f64, |m, x| m.max(*x))
                / c.iter().chain([&1.0]).fold(1.0f64, |m, x| m.min(*x));
            if spread < 1e4 {
                moderate += 1;
                assert!(r.passed(), "{z:?}: {r:?}");
            }
        }
        assert_eq!(moderate, 5);
    }

    #[test]
    fn root_branching_open_question() {
        // Depth 1 against depth 0: the root's children number k on the
        // half-tree and k + 1 on the full tree. A nontrivial solution of
        // z = f(z)^k is only compatible in the first case.
        let p = build_matrix(&ModelParams::Diamond { alpha: 0.9, beta: 0.1 }).unwrap();
        let z = multistart_fixed_points(&p, 2, &Multistart::default())
            .into_iter()
            .find(|z| (z.z(1) - 1.0).abs() > 1e-3)
            .unwrap();
        let field = BoundaryField::Constant(z);
        let half = compatibility_check(&p, &field, TreeShape::new(2, 1, RootBranching::HalfTree).unwrap(), DEFAULT_BUDGET).unwrap();
        let full = compatibility_check(&p, &field, TreeShape::new(2, 1, RootBranching::FullTree).unwrap(), DEFAULT_BUDGET).unwrap();
        assert!(half < 1e-12);
        assert!(full > 1e-4);
        let trivial = BoundaryField::Constant(FieldVector::ones());
        let full_trivial = compatibility_check(&p, &trivial, TreeShape::new(2, 1, RootBranching::FullTree).unwrap(), DEFAULT_BUDGET).unwrap();
        assert!(full_trivial < 1e-12);
    }

    #[test]
    fn shape_errors() {
        let p = build_matrix(&ModelParams::Diamond { alpha: 0.5, beta: 0.5 }).unwrap();
        let a = tree(2, 2, RootBranching::FullTree);
        let b = tree(2, 2, RootBranching::HalfTree);
        let sa = FiniteMeasureSpec::constant(&p, &a, FieldVector::ones());
        let sb = FiniteMeasureSpec::constant(&p, &b, FieldVector::ones());
        assert!(matches!(compatibility_check_specs((&sa, &a), (&sb, &b), DEFAULT_BUDGET), Err(Error::Shape(_))));
        let zero = TreeShape::new(2, 0, RootBranching::FullTree).unwrap();
        assert!(compatibility_check(&p, &BoundaryField::Constant(FieldVector::ones()), zero, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn measure_csv_dump() {
        let p = build_matrix(&ModelParams::Stick { alpha: 0.5, beta: 0.5 }).unwrap();
        let t = tree(1, 1, RootBranching::HalfTree);
        let table = finite_measure(&FiniteMeasureSpec::constant(&p, &t, FieldVector::ones()), &t, DEFAULT_BUDGET).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s0,s1,probability\n"));
        assert_eq!(text.lines().count(), 1 + table.probs.len());
    }
}
