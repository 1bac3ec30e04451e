use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::scalar::Scalar;

/// Evolving multigraph at sub-step resolution.
///
/// The state is always kept at a pending draw: `s` is the arriving vertex and
/// `i < m` is the number of its edges already attached. Completing the last
/// edge relabels `(s, m)` to `(s + 1, 0)`, so the seed graph with vertices
/// 0 and 1 joined by `m` edges is stored as `(2, 0)`.
///
/// `counts[k]` is the number of vertices of degree `k` among `0..s`; the
/// arriving vertex joins the counts only when its last edge is attached.
/// The endpoint pool lists every vertex of `0..s` once per unit of degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphState {
    m: usize,
    s: usize,
    i: usize,
    degrees: Vec<u32>,
    counts: Vec<u64>,
    pool: Vec<u32>,
    max_degree: usize,
}

impl GraphState {
    /// The seed graph: vertices 0 and 1 joined by `m` parallel edges.
    pub fn initial<T: Scalar>(params: &ModelParams<T>) -> Self {
        let m = params.m();
        let mut counts = vec![0; m + 1];
        counts[m] = 2;
        let mut pool = Vec::with_capacity(4 * m);
        pool.extend(std::iter::repeat_n(0, m));
        pool.extend(std::iter::repeat_n(1, m));
        let degree = u32::try_from(m).expect("m fits in u32");
        Self { m, s: 2, i: 0, degrees: vec![degree, degree, 0], counts, pool, max_degree: m }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Index of the arriving vertex.
    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of edges of the arriving vertex already attached.
    pub fn i(&self) -> usize {
        self.i
    }

    /// Time of the last completed graph, i.e. `t` such that every vertex
    /// `0..=t` has all its edges.
    pub fn completed_time(&self) -> usize {
        self.s - 1
    }

    /// True when no edge of the arriving vertex has been attached yet.
    pub fn at_boundary(&self) -> bool {
        self.i == 0
    }

    /// Degrees of vertices `0..=s`; the last entry is the arriving vertex.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.degrees[vertex] as usize
    }

    /// Degree counts indexed by degree. The slice may be shorter than any
    /// particular degree of interest; use [`GraphState::count`] for lookups.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, k: usize) -> u64 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn endpoint_pool(&self) -> &[u32] {
        &self.pool
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Sum of the degrees of the old vertices `0..s`.
    pub fn old_degree_total(&self) -> usize {
        self.pool.len()
    }

    /// Total attachment weight of the old vertices by the closed form
    /// `s (2m + δ) - 2m + i`.
    pub fn normalizer<T: Scalar>(&self, params: &ModelParams<T>) -> T {
        T::usize(self.s) * params.growth_rate() - T::usize(2 * self.m) + T::usize(self.i)
    }

    /// `Σ_k (k + δ) N_k` evaluated from the counts themselves.
    pub fn weighted_count_sum<T: Scalar>(&self, params: &ModelParams<T>) -> T {
        let mut total = T::zero();
        for (k, &n) in self.counts.iter().enumerate() {
            if n > 0 {
                total = total + params.weight(k) * T::from_u64(n).expect("count fits");
            }
        }
        total
    }

    /// `(Σ_k N_k, Σ_k k N_k)` computed exactly in integers.
    pub fn count_moments(&self) -> (u64, u64) {
        self.counts[..=self.max_degree]
            .iter()
            .enumerate()
            .fold((0, 0), |(n, d), (k, &c)| (n + c, d + k as u64 * c))
    }

    /// Attaches the next edge of the arriving vertex to `target`.
    ///
    /// Returns `true` when the edge completes the arrival, in which case the
    /// state has been relabeled to `(s + 1, 0)`.
    pub fn attach_edge(&mut self, target: usize) -> Result<bool> {
        if target == self.s {
            return Err(Error::SelfLoop { vertex: target });
        }
        if target > self.s {
            return Err(Error::TargetOutOfRange { target, arrival: self.s });
        }
        let old = self.degrees[target] as usize;
        self.counts[old] -= 1;
        self.bump_count(old + 1);
        self.degrees[target] += 1;
        self.pool.push(target as u32);
        self.degrees[self.s] += 1;
        self.i += 1;

        let completed = self.i == self.m;
        if completed {
            self.bump_count(self.m);
            let arriving = u32::try_from(self.s).expect("vertex ids fit in u32");
            self.pool.extend(std::iter::repeat_n(arriving, self.m));
            self.s += 1;
            self.i = 0;
            self.degrees.push(0);
        }
        debug_assert_eq!(self.pool.len(), 2 * self.m * (self.s - 1) + self.i);
        debug_assert_eq!(self.degrees[self.s] as usize, self.i);
        Ok(completed)
    }

    fn bump_count(&mut self, k: usize) {
        if k >= self.counts.len() {
            self.counts.resize((k + 1).max(2 * self.counts.len()), 0);
        }
        self.counts[k] += 1;
        self.max_degree = self.max_degree.max(k);
    }

    /// Full O(s) consistency check of every structural invariant. The
    /// weighted sum is compared to the closed-form normalizer with a
    /// relative tolerance of 1e-12.
    pub fn check_invariants(&self, params: &ModelParams<f64>) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidInput(format!("state ({}, {}): {msg}", self.s, self.i)));
        let (m, s, i) = (self.m, self.s, self.i);
        if params.m() != m {
            return fail(format!("params m = {} but state m = {m}", params.m()));
        }
        if i >= m {
            return fail("sub-step index not below m".into());
        }
        if self.degrees.len() != s + 1 || self.degrees[s] as usize != i {
            return fail("arriving vertex degree inconsistent".into());
        }
        let (n_total, d_total) = self.count_moments();
        if n_total != s as u64 {
            return fail(format!("count total {n_total} != {s}"));
        }
        if d_total != (2 * m * (s - 1) + i) as u64 {
            return fail(format!("degree total {d_total} != {}", 2 * m * (s - 1) + i));
        }
        if self.counts[..m.min(self.counts.len())].iter().any(|&c| c != 0) {
            return fail("vertex with degree below m".into());
        }
        let mut recount = vec![0u64; self.counts.len()];
        let mut multiplicity = vec![0u32; s];
        for &v in &self.pool {
            let v = v as usize;
            if v >= s {
                return fail(format!("pool holds vertex {v} not yet complete"));
            }
            multiplicity[v] += 1;
        }
        for (v, &deg) in self.degrees[..s].iter().enumerate() {
            if multiplicity[v] != deg {
                return fail(format!("vertex {v} appears {} times in pool, degree {deg}", multiplicity[v]));
            }
            recount[deg as usize] += 1;
        }
        if recount != self.counts {
            return fail("counts disagree with degrees".into());
        }
        let weighted = self.weighted_count_sum(params);
        let closed = self.normalizer(params);
        if (weighted - closed).abs() > 1e-12 * closed.abs().max(1.0) {
            return fail(format!("weighted sum {weighted} != normalizer {closed}"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize, delta: f64) -> ModelParams<f64> {
        ModelParams::new(m, delta).unwrap()
    }

    #[test]
    fn seed_graph_m1() {
        let st = GraphState::initial(&params(1, 0.0));
        assert_eq!(st.count(1), 2);
        assert_eq!(st.degrees()[..2].iter().sum::<u32>(), 2);
        assert_eq!((st.s(), st.i(), st.completed_time()), (2, 0, 1));
        st.check_invariants(&params(1, 0.0)).unwrap();
    }

    #[test]
    fn seed_graph_m3() {
        let p = params(3, -1.5);
        let st = GraphState::initial(&p);
        assert_eq!(st.counts().iter().sum::<u64>(), 2);
        assert_eq!(st.count(3), 2);
        st.check_invariants(&p).unwrap();
    }

    #[test]
    fn normalizer_examples() {
        // m = 2, δ = 0 after one edge of vertex 2: 2·4 - 4 + 1 = 5
        let p = params(2, 0.0);
        let mut st = GraphState::initial(&p);
        assert_eq!(st.normalizer(&p), 4.0);
        assert_eq!(st.weighted_count_sum(&p), 4.0);
        st.attach_edge(0).unwrap();
        assert_eq!(st.normalizer(&p), 5.0);
        assert_eq!(st.weighted_count_sum(&p), 5.0);

        let p = params(1, 0.0);
        assert_eq!(GraphState::initial(&p).normalizer(&p), 2.0);
    }

    #[test]
    fn attach_edge_relabels_after_last_edge() {
        let p = params(1, 0.0);
        let mut st = GraphState::initial(&p);
        assert!(st.attach_edge(0).unwrap());
        assert_eq!((st.s(), st.i()), (3, 0));
        assert_eq!((st.count(1), st.count(2)), (2, 1));
        assert_eq!(st.degrees(), &[2, 1, 1, 0]);
        st.check_invariants(&p).unwrap();
    }

    #[test]
    fn non_completing_edge_keeps_total() {
        let p = params(3, 0.5);
        let mut st = GraphState::initial(&p);
        let before = st.count_moments().0;
        assert!(!st.attach_edge(1).unwrap());
        assert_eq!(st.count_moments().0, before);
        assert!(!st.attach_edge(1).unwrap());
        assert_eq!(st.count_moments().0, before);
        assert!(st.attach_edge(0).unwrap());
        assert_eq!(st.count_moments().0, before + 1);
        // vertex 1 got two edges within one arrival
        assert_eq!(st.degree(1), 5);
        st.check_invariants(&p).unwrap();
    }

    #[test]
    fn attach_edge_rejects_bad_targets() {
        let p = params(2, 0.0);
        let mut st = GraphState::initial(&p);
        assert_eq!(st.attach_edge(2), Err(Error::SelfLoop { vertex: 2 }));
        assert_eq!(st.attach_edge(3), Err(Error::TargetOutOfRange { target: 3, arrival: 2 }));
        assert_eq!(st, GraphState::initial(&p));
    }

    #[test]
    fn invariant_check_detects_corruption() {
        let p = params(1, 0.0);
        let mut st = GraphState::initial(&p);
        st.attach_edge(1).unwrap();
        st.counts[1] += 1;
        assert!(st.check_invariants(&p).is_err());
    }
}
