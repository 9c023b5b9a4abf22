//! Exact 1-Wasserstein distance between two sets of feature rows under
//! uniform marginals.
//!
//! The transport problem is solved by a network simplex on the complete
//! bipartite graph with Bland-style anti-cycling. Flow amounts are tracked
//! in exact integer units of 1/(|X|·|Y|) mass, so feasibility never drifts
//! and degeneracy is detected exactly; only costs and duals use floating
//! point. A successive-shortest-paths solver in [`oracle`] provides an
//! independent check on small instances.

use crate::error::{Error, Result};
use crate::features::SparseRow;

/// Marginal feasibility tolerance for returned transport plans.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Euclidean ground distance between two feature rows sharing one column
/// space.
pub fn ground_distance(x: &SparseRow, y: &SparseRow) -> Result<f64> {
    if x.width() != y.width() {
        return Err(Error::Dimension(format!(
            "rows live in different column spaces ({} vs {})",
            x.width(),
            y.width()
        )));
    }
    Ok(x.euclidean_distance(y))
}

/// An optimal transport plan: positive flows, their objective value, and
/// the marginals they must satisfy.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    flows: Vec<(usize, usize, f64)>,
    objective: f64,
    rows: usize,
    cols: usize,
}

impl TransportPlan {
    /// Positive flows (i, j, f_ij).
    pub fn flows(&self) -> &[(usize, usize, f64)] {
        &self.flows
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// Largest deviation of any row or column sum from its uniform marginal.
    pub fn max_marginal_residual(&self) -> f64 {
        let mut row_sums = vec![0.0f64; self.rows];
        let mut col_sums = vec![0.0f64; self.cols];
        for &(i, j, f) in &self.flows {
            row_sums[i] += f;
            col_sums[j] += f;
        }
        let row_target = 1.0 / self.rows as f64;
        let col_target = 1.0 / self.cols as f64;
        let r = row_sums
            .iter()
            .map(|s| (s - row_target).abs())
            .fold(0.0, f64::max);
        let c = col_sums
            .iter()
            .map(|s| (s - col_target).abs())
            .fold(0.0, f64::max);
        r.max(c)
    }

    /// One `i j f_ij` line per positive flow, for debugging.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for &(i, j, f) in &self.flows {
            out.push_str(&format!("{i} {j} {f:.17e}\n"));
        }
        out
    }
}

/// Exact 1-Wasserstein distance between the node feature rows of two
/// graphs, with the optimal plan. Both sets carry uniform weights, so the
/// flow total is one and the distance equals the plan objective.
pub fn solve_w1(xs: &[SparseRow], ys: &[SparseRow]) -> Result<(f64, TransportPlan)> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Precondition(
            "both feature-row sets must be non-empty".into(),
        ));
    }
    let width = xs[0].width();
    if xs.iter().chain(ys).any(|r| r.width() != width) {
        return Err(Error::Dimension(
            "all rows must share one column space".into(),
        ));
    }
    let m = xs.len();
    let n = ys.len();
    let mut cost = vec![0.0f64; m * n];
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            cost[i * n + j] = x.euclidean_distance(y);
        }
    }
    solve_w1_from_costs(&cost, m, n)
}

/// Solves the uniform-marginal transport problem for an explicit dense cost
/// matrix (row-major, `m` rows and `n` columns).
pub fn solve_w1_from_costs(cost: &[f64], m: usize, n: usize) -> Result<(f64, TransportPlan)> {
    if m == 0 || n == 0 || cost.len() != m * n {
        return Err(Error::Dimension(format!(
            "cost matrix of {} entries does not match {}x{}",
            cost.len(),
            m,
            n
        )));
    }
    if cost.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::InvalidInput(
            "transport costs must be finite and non-negative".into(),
        ));
    }
    let mut simplex = NetworkSimplex::new(cost, m, n);
    simplex.solve()?;
    Ok(simplex.into_plan())
}

/// Transportation simplex on the complete bipartite graph. Node ids:
/// sources 0..m, sinks m..m+n. Arc (i, j) has id i*n + j. Flows are stored
/// in integer units of 1/(m*n) mass: each source supplies n units and each
/// sink demands m units.
struct NetworkSimplex<'a> {
    cost: &'a [f64],
    m: usize,
    n: usize,
    units: Vec<u64>,
    in_basis: Vec<bool>,
    tree_adj: Vec<Vec<usize>>,
    potential: Vec<f64>,
    rc_eps: f64,
}

const MAX_PIVOTS: usize = 2_000_000;

impl<'a> NetworkSimplex<'a> {
    fn new(cost: &'a [f64], m: usize, n: usize) -> Self {
        let max_cost = cost.iter().cloned().fold(0.0, f64::max);
        NetworkSimplex {
            cost,
            m,
            n,
            units: vec![0; m * n],
            in_basis: vec![false; m * n],
            tree_adj: vec![Vec::new(); m + n],
            potential: vec![0.0; m + n],
            rc_eps: 1e-12 * (1.0 + max_cost),
        }
    }

    fn arc_ends(&self, arc: usize) -> (usize, usize) {
        (arc / self.n, self.m + arc % self.n)
    }

    fn add_basic(&mut self, arc: usize, units: u64) {
        let (s, t) = self.arc_ends(arc);
        self.in_basis[arc] = true;
        self.units[arc] = units;
        self.tree_adj[s].push(arc);
        self.tree_adj[t].push(arc);
    }

    fn remove_basic(&mut self, arc: usize) {
        let (s, t) = self.arc_ends(arc);
        self.in_basis[arc] = false;
        self.units[arc] = 0;
        self.tree_adj[s].retain(|&a| a != arc);
        self.tree_adj[t].retain(|&a| a != arc);
    }

    /// Northwest-corner initial basis: exactly m + n - 1 basic arcs.
    fn initialize(&mut self) {
        let (m, n) = (self.m, self.n);
        let mut supply = vec![n as u64; m];
        let mut demand = vec![m as u64; n];
        let (mut i, mut j) = (0, 0);
        loop {
            let q = supply[i].min(demand[j]);
            self.add_basic(i * n + j, q);
            supply[i] -= q;
            demand[j] -= q;
            if i == m - 1 && j == n - 1 {
                break;
            }
            // advance exactly one index; prefer the exhausted row
            if supply[i] == 0 && i < m - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    /// Dual potentials from the basis tree, rooted at node 0.
    fn recompute_potentials(&mut self) {
        let mut visited = vec![false; self.m + self.n];
        self.potential[0] = 0.0;
        visited[0] = true;
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            for &arc in &self.tree_adj[node] {
                let (s, t) = self.arc_ends(arc);
                let next = if s == node { t } else { s };
                if !visited[next] {
                    visited[next] = true;
                    self.potential[next] = self.cost[arc] - self.potential[node];
                    stack.push(next);
                }
            }
        }
    }

    /// First arc (ascending id) whose reduced cost is negative.
    fn entering_arc(&self) -> Option<usize> {
        for arc in 0..self.cost.len() {
            if self.in_basis[arc] {
                continue;
            }
            let (s, t) = self.arc_ends(arc);
            let rc = self.cost[arc] - self.potential[s] - self.potential[t];
            if rc < -self.rc_eps {
                return Some(arc);
            }
        }
        None
    }

    /// Tree path between the endpoints of `arc` as a list of arcs.
    fn cycle_path(&self, arc: usize) -> Vec<usize> {
        let (from, to) = self.arc_ends(arc);
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.m + self.n];
        let mut visited = vec![false; self.m + self.n];
        visited[from] = true;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(node) = queue.pop_front() {
            if node == to {
                break;
            }
            for &a in &self.tree_adj[node] {
                let (s, t) = self.arc_ends(a);
                let next = if s == node { t } else { s };
                if !visited[next] {
                    visited[next] = true;
                    parent[next] = Some((node, a));
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut cursor = to;
        while let Some((prev, a)) = parent[cursor] {
            path.push(a);
            cursor = prev;
        }
        path.reverse(); // arcs in order from `from` towards `to`
        path
    }

    fn pivot(&mut self, entering: usize) -> Result<()> {
        let (from, _) = self.arc_ends(entering);
        let path = self.cycle_path(entering);
        // the cycle pushes theta through the entering arc and returns along
        // the tree path; walking that path source->sink is the direction
        // the returning flow runs against, so those arcs lose flow
        let mut node = from;
        let mut loses_flow = vec![false; path.len()];
        for (idx, &a) in path.iter().enumerate() {
            let (s, t) = self.arc_ends(a);
            let forward = s == node;
            node = if forward { t } else { s };
            loses_flow[idx] = forward;
        }
        // ratio test over losing arcs; ties pick the smallest arc id
        let mut theta = u64::MAX;
        let mut leaving: Option<usize> = None;
        for (idx, &a) in path.iter().enumerate() {
            if loses_flow[idx] {
                let f = self.units[a];
                if f < theta || (f == theta && leaving.is_some_and(|l| a < l)) {
                    theta = f;
                    leaving = Some(a);
                }
            }
        }
        let leaving_arc = leaving.ok_or_else(|| {
            Error::Internal("transport cycle without a leaving arc".into())
        })?;
        for (idx, &a) in path.iter().enumerate() {
            if loses_flow[idx] {
                self.units[a] -= theta;
            } else {
                self.units[a] += theta;
            }
        }
        self.remove_basic(leaving_arc);
        self.add_basic(entering, theta);
        Ok(())
    }

    fn solve(&mut self) -> Result<()> {
        self.initialize();
        for _ in 0..MAX_PIVOTS {
            self.recompute_potentials();
            match self.entering_arc() {
                None => return Ok(()),
                Some(arc) => self.pivot(arc)?,
            }
        }
        Err(Error::Internal(format!(
            "network simplex did not converge within {MAX_PIVOTS} pivots"
        )))
    }

    fn into_plan(self) -> (f64, TransportPlan) {
        let unit = 1.0 / (self.m as f64 * self.n as f64);
        let mut flows = Vec::new();
        let mut objective = 0.0f64;
        for arc in 0..self.cost.len() {
            if self.units[arc] > 0 {
                let f = self.units[arc] as f64 * unit;
                flows.push((arc / self.n, arc % self.n, f));
                objective += f * self.cost[arc];
            }
        }
        let plan = TransportPlan {
            flows,
            objective,
            rows: self.m,
            cols: self.n,
        };
        (objective, plan)
    }
}

/// Independent brute-force solver for small transport instances, used by
/// the verification suite to cross-check [`solve_w1`].
pub mod oracle {
    use super::*;

    /// Largest `|X| * |Y|` the oracle accepts.
    pub const MAX_CELLS: usize = 64;

    /// Solves the same uniform-marginal problem by successive shortest
    /// paths (min-cost max-flow with Bellman-Ford), an algorithm unrelated
    /// to the simplex it checks.
    pub fn w1_bruteforce(xs: &[SparseRow], ys: &[SparseRow]) -> Result<f64> {
        if xs.is_empty() || ys.is_empty() {
            return Err(Error::Precondition(
                "both feature-row sets must be non-empty".into(),
            ));
        }
        let m = xs.len();
        let n = ys.len();
        let mut cost = vec![0.0f64; m * n];
        for (i, x) in xs.iter().enumerate() {
            for (j, y) in ys.iter().enumerate() {
                cost[i * n + j] = ground_distance(x, y)?;
            }
        }
        w1_bruteforce_from_costs(&cost, m, n)
    }

    pub fn w1_bruteforce_from_costs(cost: &[f64], m: usize, n: usize) -> Result<f64> {
        if m * n > MAX_CELLS {
            return Err(Error::Precondition(format!(
                "oracle size cap exceeded: {}x{} > {MAX_CELLS} cells",
                m, n
            )));
        }
        if cost.len() != m * n {
            return Err(Error::Dimension(format!(
                "cost matrix of {} entries does not match {}x{}",
                cost.len(),
                m,
                n
            )));
        }
        // min-cost max-flow in integer units of 1/(m*n) mass:
        // source -> each left node (capacity n), left i -> right j
        // (capacity n, cost c_ij), each right node -> sink (capacity m)
        let nodes = m + n + 2;
        let source = m + n;
        let sink = m + n + 1;
        let mut edges: Vec<(usize, usize, i64, f64)> = Vec::new(); // to, from implied by list, cap, cost
        let mut graph: Vec<Vec<usize>> = vec![Vec::new(); nodes];
        let add_edge = |graph: &mut Vec<Vec<usize>>,
                            edges: &mut Vec<(usize, usize, i64, f64)>,
                            from: usize,
                            to: usize,
                            cap: i64,
                            cost: f64| {
            graph[from].push(edges.len());
            edges.push((from, to, cap, cost));
            graph[to].push(edges.len());
            edges.push((to, from, 0, -cost));
        };
        for i in 0..m {
            add_edge(&mut graph, &mut edges, source, i, n as i64, 0.0);
        }
        for j in 0..n {
            add_edge(&mut graph, &mut edges, m + j, sink, m as i64, 0.0);
        }
        for i in 0..m {
            for j in 0..n {
                add_edge(&mut graph, &mut edges, i, m + j, n as i64, cost[i * n + j]);
            }
        }

        let total_units = (m * n) as i64;
        let mut pushed = 0i64;
        let mut total_cost = 0.0f64;
        while pushed < total_units {
            // Bellman-Ford over the residual graph
            let mut dist = vec![f64::INFINITY; nodes];
            let mut pred: Vec<Option<usize>> = vec![None; nodes];
            dist[source] = 0.0;
            for _ in 0..nodes {
                let mut improved = false;
                for (e, &(from, to, cap, c)) in edges.iter().enumerate() {
                    if cap > 0 && dist[from].is_finite() && dist[from] + c < dist[to] - 1e-15 {
                        dist[to] = dist[from] + c;
                        pred[to] = Some(e);
                        improved = true;
                    }
                }
                if !improved {
                    break;
                }
            }
            if !dist[sink].is_finite() {
                return Err(Error::Internal("oracle flow network disconnected".into()));
            }
            // bottleneck along the path
            let mut bottleneck = total_units - pushed;
            let mut cursor = sink;
            while let Some(e) = pred[cursor] {
                bottleneck = bottleneck.min(edges[e].2);
                cursor = edges[e].0;
            }
            let mut cursor = sink;
            while let Some(e) = pred[cursor] {
                edges[e].2 -= bottleneck;
                edges[e ^ 1].2 += bottleneck;
                total_cost += bottleneck as f64 * edges[e].3;
                cursor = edges[e].0;
            }
            pushed += bottleneck;
        }
        Ok(total_cost / total_units as f64)
    }
}
