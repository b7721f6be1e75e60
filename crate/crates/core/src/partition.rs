//! Randomised partitioning with prescribed class proportions and
//! near-expected degrees into every class, made constructive by resampling.
//!
//! Every vertex of the target set `A` is placed in class `i` with
//! probability `p_i`. The constraints checked afterwards are
//!
//! * degree (lower): `deg(v, A_i) >= (1 - 2γ) p_i d` for each tracked `v`,
//! * size: `|A_i| = (1 ± γ) p_i |A|`,
//! * degree (upper, optional): `deg(v, A_i) <= (1 + 2γ) p_i d`.
//!
//! While any constraint is violated, only vertices that take part in a
//! violated constraint are re-randomised ([`ResampleMode::Targeted`]): each
//! round walks the events violated at its start (size events first, then by
//! vertex id) and redraws one random participant at a time while the event
//! still fails, up to a per-event cap. [`ResampleMode::Rejection`] redraws
//! everything instead. Sizes are checked
//! globally rather than per chunk of `A`.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{HostGraph, Vertex};
use crate::rng;

const EPS: f64 = 1e-9;
const NONE: usize = usize::MAX;
/// Rounds without a new best before the guard is lifted once.
const STALL_ROUNDS: usize = 10;
/// A kick only helps when a handful of events are stuck; on a broadly
/// violated configuration it just undoes progress.
const KICK_MAX_EVENTS: usize = 32;
/// Rounds without a marked improvement after which a broadly violated
/// search is abandoned.
const GIVE_UP_ROUNDS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum ResampleMode {
    #[default]
    Targeted,
    Rejection,
}

#[derive(Debug, Clone)]
pub struct PartitionRequest<'a> {
    pub graph: &'a HostGraph,
    /// The set `A` being split.
    pub target: &'a [Vertex],
    /// Vertices whose degrees into the classes are constrained.
    pub tracked: &'a [Vertex],
    pub proportions: Vec<f64>,
    /// Lower bound every proportion must respect.
    pub min_proportion: f64,
    pub gamma: f64,
    /// Size tolerance; `gamma` when unset.
    pub size_gamma: Option<f64>,
    /// The reference degree `d` the degree bounds are relative to.
    pub reference_degree: f64,
    pub upper_bounds: bool,
    pub mode: ResampleMode,
    pub max_rounds: usize,
}

impl<'a> PartitionRequest<'a> {
    pub fn new(
        graph: &'a HostGraph,
        target: &'a [Vertex],
        tracked: &'a [Vertex],
        proportions: Vec<f64>,
        gamma: f64,
        reference_degree: f64,
    ) -> Self {
        let min_proportion = proportions.iter().copied().fold(f64::INFINITY, f64::min);
        Self {
            graph,
            target,
            tracked,
            proportions,
            min_proportion,
            gamma,
            size_gamma: None,
            reference_degree,
            upper_bounds: false,
            mode: ResampleMode::Targeted,
            max_rounds: 1000,
        }
    }

    pub fn with_upper_bounds(mut self, on: bool) -> Self {
        self.upper_bounds = on;
        self
    }

    pub fn with_size_gamma(mut self, size_gamma: f64) -> Self {
        self.size_gamma = Some(size_gamma);
        self
    }

    pub fn with_mode(mut self, mode: ResampleMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_max_rounds(mut self, rounds: usize) -> Self {
        self.max_rounds = rounds;
        self
    }

    fn size_gamma(&self) -> f64 {
        self.size_gamma.unwrap_or(self.gamma)
    }
}

/// Worst relative deviations seen. A result satisfies the constraints
/// exactly when `degree <= 2γ` and `size <= γ_size`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Slack {
    pub degree: f64,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult {
    /// Sorted classes; always a partition of the target set.
    pub classes: Vec<Vec<Vertex>>,
    pub resample_rounds: usize,
    pub achieved_slack: Slack,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    Size { class: usize, size: usize, lo: f64, hi: f64 },
    DegreeLow { vertex: Vertex, class: usize, degree: usize, bound: f64 },
    DegreeHigh { vertex: Vertex, class: usize, degree: usize, bound: f64 },
}

#[derive(Debug, Clone, Error)]
pub enum PartitionError {
    #[error("invalid partition request: {0}")]
    InvalidRequest(String),
    #[error("vertex {vertex} has degree {degree} into the target, outside [{lo:.2}, {hi:.2}]")]
    PreconditionDegree { vertex: Vertex, degree: usize, lo: f64, hi: f64 },
    #[error("resample budget exhausted after {rounds} rounds with {} violated constraints", violations.len())]
    ResampleBudgetExhausted {
        rounds: usize,
        violations: Vec<Violation>,
        /// Assignment with the fewest violations seen.
        best_effort: Box<PartitionResult>,
    },
}

impl PartitionError {
    /// The fallback assignment when the budget ran out.
    pub fn best_effort(&self) -> Option<&PartitionResult> {
        match self {
            PartitionError::ResampleBudgetExhausted { best_effort, .. } => Some(best_effort),
            _ => None,
        }
    }
}

struct State<'r, 'a> {
    req: &'r PartitionRequest<'a>,
    m: usize,
    /// position in sorted target, per vertex
    pos: Vec<usize>,
    /// position in tracked list, per vertex
    tpos: Vec<usize>,
    order: Vec<Vertex>,
    class: Vec<usize>,
    counts: Vec<u32>,
    sizes: Vec<usize>,
    cumulative: Vec<f64>,
    /// scratch for `swap_gain`, all zero between calls
    shift: Vec<i32>,
    touched: Vec<usize>,
}

impl State<'_, '_> {
    fn sample(&self, rng: &mut rng::Rng) -> usize {
        let x: f64 = rng.gen();
        self.cumulative.iter().position(|&c| x < c).unwrap_or(self.m - 1)
    }

    fn assign(&mut self, idx: usize, new: usize) {
        let old = self.class[idx];
        if old == new {
            return;
        }
        let v = self.order[idx];
        for &w in self.req.graph.neighbors(v) {
            let t = self.tpos[w];
            if t != NONE {
                if old != NONE {
                    self.counts[t * self.m + old] -= 1;
                }
                self.counts[t * self.m + new] += 1;
            }
        }
        if old != NONE {
            self.sizes[old] -= 1;
        }
        self.sizes[new] += 1;
        self.class[idx] = new;
    }

    fn bounds(&self) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        let r = self.req;
        let d = r.reference_degree;
        let g2 = 2.0 * r.gamma;
        let gs = r.size_gamma();
        let total = self.order.len() as f64;
        let deg = r.proportions.iter().map(|&p| ((1.0 - g2) * p * d, (1.0 + g2) * p * d)).collect();
        let size = r.proportions.iter().map(|&p| ((1.0 - gs) * p * total, (1.0 + gs) * p * total)).collect();
        (deg, size)
    }

    fn violations(&self) -> Vec<Violation> {
        let (deg, size) = self.bounds();
        let mut out = Vec::new();
        for (i, &(lo, hi)) in size.iter().enumerate() {
            let s = self.sizes[i] as f64;
            if s < lo - EPS || s > hi + EPS {
                out.push(Violation::Size { class: i, size: self.sizes[i], lo, hi });
            }
        }
        for (t, &v) in self.req.tracked.iter().enumerate() {
            for (i, &(lo, hi)) in deg.iter().enumerate() {
                let c = self.counts[t * self.m + i];
                if (c as f64) < lo - EPS {
                    out.push(Violation::DegreeLow { vertex: v, class: i, degree: c as usize, bound: lo });
                } else if self.req.upper_bounds && c as f64 > hi + EPS {
                    out.push(Violation::DegreeHigh { vertex: v, class: i, degree: c as usize, bound: hi });
                }
            }
        }
        out
    }

    fn slack(&self) -> Slack {
        let r = self.req;
        let d = r.reference_degree;
        let total = self.order.len() as f64;
        let mut slack = Slack::default();
        for (i, &p) in r.proportions.iter().enumerate() {
            let expect = p * total;
            if expect > 0.0 {
                slack.size = slack.size.max((self.sizes[i] as f64 - expect).abs() / expect);
            }
            let expect_deg = p * d;
            if expect_deg <= 0.0 {
                continue;
            }
            for t in 0..r.tracked.len() {
                let c = self.counts[t * self.m + i] as f64;
                slack.degree = slack.degree.max((expect_deg - c) / expect_deg);
                if r.upper_bounds {
                    slack.degree = slack.degree.max((c - expect_deg) / expect_deg);
                }
            }
        }
        slack
    }

    fn snapshot(&self, rounds: usize) -> PartitionResult {
        let mut classes = vec![Vec::new(); self.m];
        for (idx, &v) in self.order.iter().enumerate() {
            classes[self.class[idx]].push(v);
        }
        PartitionResult { classes, resample_rounds: rounds, achieved_slack: self.slack() }
    }

    fn still_violated(&self, viol: &Violation) -> bool {
        match *viol {
            Violation::Size { class, lo, hi, .. } => {
                let s = self.sizes[class] as f64;
                s < lo - EPS || s > hi + EPS
            }
            Violation::DegreeLow { vertex, class, bound, .. } => {
                (self.counts[self.tpos[vertex] * self.m + class] as f64) < bound - EPS
            }
            Violation::DegreeHigh { vertex, class, bound, .. } => {
                self.counts[self.tpos[vertex] * self.m + class] as f64 > bound + EPS
            }
        }
    }

    /// Target positions whose variables an event depends on and whose
    /// redraw can repair it.
    fn participants(&self, viol: &Violation) -> Vec<usize> {
        let g = self.req.graph;
        let all = 0..self.order.len();
        match *viol {
            Violation::Size { class, size, hi, .. } => {
                if size as f64 > hi {
                    all.filter(|&x| self.class[x] == class).collect()
                } else {
                    all.filter(|&x| self.class[x] != class).collect()
                }
            }
            Violation::DegreeLow { vertex, class, .. } => g
                .neighbors(vertex)
                .iter()
                .map(|&w| self.pos[w])
                .filter(|&x| x != NONE && self.class[x] != class)
                .collect(),
            Violation::DegreeHigh { vertex, class, .. } => g
                .neighbors(vertex)
                .iter()
                .map(|&w| self.pos[w])
                .filter(|&x| x != NONE && self.class[x] == class)
                .collect(),
        }
    }

    /// Whether position `idx` still belongs to the participants of `viol`.
    fn participates(&self, viol: &Violation, idx: usize) -> bool {
        match *viol {
            Violation::Size { class, size, hi, .. } => (self.class[idx] == class) == (size as f64 > hi),
            Violation::DegreeLow { class, .. } => self.class[idx] != class,
            Violation::DegreeHigh { class, .. } => self.class[idx] == class,
        }
    }

    /// Draws allowed for one event in one round: enough to cover its
    /// deviation several times over at the success rate of a single redraw.
    fn attempt_cap(&self, viol: &Violation) -> usize {
        let (dev, class) = match *viol {
            Violation::Size { class, size, lo, hi } => ((size as f64 - hi).max(lo - size as f64), class),
            Violation::DegreeLow { class, degree, bound, .. } => (bound - degree as f64, class),
            Violation::DegreeHigh { class, degree, bound, .. } => (degree as f64 - bound, class),
        };
        let p = self.req.proportions[class].max(EPS);
        let rate = match viol {
            Violation::DegreeHigh { .. } => 1.0 - p,
            Violation::Size { size, hi, .. } if *size as f64 > *hi => 1.0 - p,
            _ => p,
        };
        (4.0 * dev.ceil().max(1.0) / rate.max(EPS)).ceil() as usize
    }

    /// Number of violated constraints among those touched by moving
    /// target position `idx` from class `from` to class `to`, before minus
    /// after (positive means the move helps).
    fn gain(&self, idx: usize, from: usize, to: usize, bounds: &Bounds) -> i64 {
        let mut gain = 0i64;
        let mut tally = |before: bool, after: bool| gain += i64::from(before) - i64::from(after);
        let size_bad = |c: usize, s: usize| {
            let s = s as f64;
            s < bounds.size[c].0 - EPS || s > bounds.size[c].1 + EPS
        };
        tally(size_bad(from, self.sizes[from]), size_bad(from, self.sizes[from] - 1));
        tally(size_bad(to, self.sizes[to]), size_bad(to, self.sizes[to] + 1));
        let upper = self.req.upper_bounds;
        let deg_bad = |c: usize, k: u32| {
            let k = k as f64;
            k < bounds.degree[c].0 - EPS || (upper && k > bounds.degree[c].1 + EPS)
        };
        for &w in self.req.graph.neighbors(self.order[idx]) {
            let t = self.tpos[w];
            if t == NONE {
                continue;
            }
            let (cf, ct) = (self.counts[t * self.m + from], self.counts[t * self.m + to]);
            tally(deg_bad(from, cf), deg_bad(from, cf - 1));
            tally(deg_bad(to, ct), deg_bad(to, ct + 1));
        }
        gain
    }

    /// Class a participant of `viol` would be redrawn into.
    fn destination(&self, viol: &Violation, rng: &mut rng::Rng) -> usize {
        let out_of = match *viol {
            Violation::Size { class, size, hi, .. } if size as f64 > hi => class,
            Violation::DegreeHigh { class, .. } => class,
            Violation::Size { class, .. } | Violation::DegreeLow { class, .. } => return class,
        };
        loop {
            let c = self.sample(rng);
            if c != out_of || self.m == 1 {
                return c;
            }
        }
    }

    /// One sequential pass: each event still violated when reached gets
    /// random participants redrawn one at a time until it holds or its
    /// attempt cap is spent. A redraw is kept only if it does not increase
    /// the number of violated constraints it touches.
    /// Unguarded redraw of one random participant per violated event, to
    /// leave a configuration where every guarded move is refused.
    fn kick(&mut self, violations: &[Violation], rng: &mut rng::Rng) {
        for viol in violations {
            if !self.still_violated(viol) {
                continue;
            }
            if let Some(&idx) = self.participants(viol).choose(rng) {
                let to = self.destination(viol, rng);
                self.assign(idx, to);
            }
        }
    }

    fn targeted_pass(&mut self, violations: &[Violation], rng: &mut rng::Rng) {
        let bounds = self.bounds_table();
        for viol in violations {
            let cap = self.attempt_cap(viol);
            let mut attempts = 0;
            let candidates = self.participants(viol);
            while attempts < cap && self.still_violated(viol) {
                let Some(&idx) = candidates.choose(rng) else { break };
                attempts += 1;
                if !self.participates(viol, idx) {
                    continue;
                }
                let to = self.destination(viol, rng);
                let from = self.class[idx];
                if to != from {
                    if self.gain(idx, from, to, &bounds) >= 0 {
                        self.assign(idx, to);
                    } else {
                        self.try_swap(idx, from, to, &bounds, rng);
                    }
                }
            }
        }
    }

    /// Change in violated degree constraints when `a` moves from `from` to
    /// `to` and `b` moves back; class sizes are unaffected.
    fn swap_gain(&mut self, a: usize, b: usize, from: usize, to: usize, bounds: &Bounds) -> i64 {
        let g = self.req.graph;
        for (x, step) in [(a, -1), (b, 1)] {
            for &w in g.neighbors(self.order[x]) {
                let t = self.tpos[w];
                if t != NONE {
                    if self.shift[t] == 0 {
                        self.touched.push(t);
                    }
                    self.shift[t] += step;
                }
            }
        }
        let upper = self.req.upper_bounds;
        let bad = |c: usize, k: i64| {
            let k = k as f64;
            i64::from(k < bounds.degree[c].0 - EPS || (upper && k > bounds.degree[c].1 + EPS))
        };
        let mut gain = 0;
        for &t in &self.touched {
            let delta = i64::from(std::mem::take(&mut self.shift[t]));
            if delta == 0 {
                continue;
            }
            let cf = i64::from(self.counts[t * self.m + from]);
            let ct = i64::from(self.counts[t * self.m + to]);
            gain += bad(from, cf) + bad(to, ct) - bad(from, cf + delta) - bad(to, ct - delta);
        }
        self.touched.clear();
        gain
    }

    /// Moves `idx` to `to` together with a random position of `to` moving
    /// back to `from`, keeping class sizes fixed. Kept only if the touched
    /// constraints do not get worse.
    fn try_swap(&mut self, idx: usize, from: usize, to: usize, bounds: &Bounds, rng: &mut rng::Rng) {
        let len = self.order.len();
        let Some(other) = (0..4 * self.m).map(|_| rng.gen_range(0..len)).find(|&x| self.class[x] == to) else {
            return;
        };
        if self.swap_gain(idx, other, from, to, bounds) >= 0 {
            self.assign(idx, to);
            self.assign(other, from);
        }
    }

    fn bounds_table(&self) -> Bounds {
        let (degree, size) = self.bounds();
        Bounds { degree, size }
    }
}

struct Bounds {
    degree: Vec<(f64, f64)>,
    size: Vec<(f64, f64)>,
}

fn validate(req: &PartitionRequest) -> Result<(), PartitionError> {
    let bad = |msg: String| Err(PartitionError::InvalidRequest(msg));
    let m = req.proportions.len();
    if m == 0 {
        return bad("no classes".into());
    }
    let sum: f64 = req.proportions.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return bad(format!("proportions sum to {sum}, not 1"));
    }
    if !(req.min_proportion > 0.0) || req.proportions.iter().any(|&p| p < req.min_proportion) {
        return bad(format!("every proportion must be at least p_min = {} > 0", req.min_proportion));
    }
    // gamma = 0 is accepted: it makes exact proportional degrees the target
    if !(0.0..=0.5).contains(&req.gamma) {
        return bad(format!("gamma = {} outside [0, 1/2]", req.gamma));
    }
    if !(0.0..=1.0).contains(&req.size_gamma()) {
        return bad(format!("size gamma = {} outside [0, 1]", req.size_gamma()));
    }
    if !(req.reference_degree >= 0.0) {
        return bad("reference degree must be non-negative".into());
    }
    Ok(())
}

/// Splits `req.target` into classes meeting the constraints described in the
/// module docs. Deterministic in `(req, seed)`.
pub fn partition(req: &PartitionRequest, seed: u64) -> Result<PartitionResult, PartitionError> {
    validate(req)?;
    let g = req.graph;
    let n = g.n();
    let m = req.proportions.len();

    let mut order = req.target.to_vec();
    order.sort_unstable();
    let mut pos = vec![NONE; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n {
            return Err(PartitionError::InvalidRequest(format!("target vertex {v} out of range")));
        }
        if pos[v] != NONE {
            return Err(PartitionError::InvalidRequest(format!("target vertex {v} listed twice")));
        }
        pos[v] = i;
    }
    let mut tpos = vec![NONE; n];
    for (t, &v) in req.tracked.iter().enumerate() {
        if v >= n || tpos[v] != NONE {
            return Err(PartitionError::InvalidRequest(format!("bad tracked vertex {v}")));
        }
        tpos[v] = t;
    }

    let d = req.reference_degree;
    let (pre_lo, pre_hi) = ((1.0 - req.gamma) * d, (1.0 + req.gamma) * d);
    for &v in req.tracked {
        let deg = g.neighbors(v).iter().filter(|&&w| pos[w] != NONE).count();
        let f = deg as f64;
        if f < pre_lo - EPS || (req.upper_bounds && f > pre_hi + EPS) {
            let hi = if req.upper_bounds { pre_hi } else { f64::INFINITY };
            return Err(PartitionError::PreconditionDegree { vertex: v, degree: deg, lo: pre_lo, hi });
        }
    }

    let mut cumulative = Vec::with_capacity(m);
    let mut acc = 0.0;
    for &p in &req.proportions {
        acc += p;
        cumulative.push(acc);
    }
    let mut st = State {
        req,
        m,
        pos,
        tpos,
        class: vec![NONE; order.len()],
        order,
        counts: vec![0; req.tracked.len() * m],
        sizes: vec![0; m],
        cumulative,
        shift: vec![0; req.tracked.len()],
        touched: Vec::new(),
    };
    let mut rng = rng::stream(seed, 0x7061_7274);
    for idx in 0..st.order.len() {
        let c = st.sample(&mut rng);
        st.assign(idx, c);
    }

    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut stale = 0;
    let mut since_best = 0;
    let mut milestone = usize::MAX;
    for round in 0..=req.max_rounds {
        let violations = st.violations();
        if violations.is_empty() {
            return Ok(st.snapshot(round));
        }
        if best.as_ref().map_or(true, |(count, _)| violations.len() < *count) {
            best = Some((violations.len(), st.class.clone()));
            stale = 0;
        } else {
            stale += 1;
        }
        // slow creep on an infeasible instance does not extend the search
        if violations.len() + (milestone / 20).max(1) <= milestone {
            milestone = violations.len();
            since_best = 0;
        } else {
            since_best += 1;
        }
        // a few stuck events are cheap to keep kicking; a broad stall is not
        let hopeless = since_best >= GIVE_UP_ROUNDS && violations.len() > KICK_MAX_EVENTS;
        if round == req.max_rounds || hopeless {
            let (_, classes) = best.expect("set above");
            st.class = classes;
            // recompute counts for the restored assignment
            st.counts.iter_mut().for_each(|c| *c = 0);
            st.sizes.iter_mut().for_each(|c| *c = 0);
            let restored = std::mem::replace(&mut st.class, vec![NONE; st.order.len()]);
            for (idx, &c) in restored.iter().enumerate() {
                st.assign(idx, c);
            }
            let violations = st.violations();
            return Err(PartitionError::ResampleBudgetExhausted {
                rounds: round,
                violations,
                best_effort: Box::new(st.snapshot(round)),
            });
        }
        match req.mode {
            ResampleMode::Targeted if stale >= STALL_ROUNDS && violations.len() <= KICK_MAX_EVENTS => {
                stale = 0;
                st.kick(&violations, &mut rng);
            }
            ResampleMode::Targeted => st.targeted_pass(&violations, &mut rng),
            ResampleMode::Rejection => {
                for idx in 0..st.order.len() {
                    let c = st.sample(&mut rng);
                    st.assign(idx, c);
                }
            }
        }
    }
    unreachable!("loop returns on its last round")
}

/// `V ∪ W` split of all vertices with proportions `(1 - p, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub v: Vec<Vertex>,
    pub w: Vec<Vertex>,
    pub result: PartitionResult,
}

impl Split {
    fn from_result(result: PartitionResult) -> Self {
        Split { v: result.classes[0].clone(), w: result.classes[1].clone(), result }
    }
}

/// Two-class partition of `V(G)` with degree bounds on both sides for every
/// vertex, relative to the average degree.
pub fn split_v_w(g: &HostGraph, p: f64, gamma: f64, seed: u64) -> Result<Split, PartitionError> {
    let all: Vec<Vertex> = (0..g.n()).collect();
    split_v_w_tracking(g, &all, p, gamma, g.average_degree(), seed)
}

/// As [`split_v_w`], constraining only `tracked` and using an explicit
/// reference degree.
pub fn split_v_w_tracking(
    g: &HostGraph,
    tracked: &[Vertex],
    p: f64,
    gamma: f64,
    reference_degree: f64,
    seed: u64,
) -> Result<Split, PartitionError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(PartitionError::InvalidRequest(format!("split fraction {p} outside (0, 1)")));
    }
    let all: Vec<Vertex> = (0..g.n()).collect();
    let req =
        PartitionRequest::new(g, &all, tracked, vec![1.0 - p, p], gamma, reference_degree).with_upper_bounds(true);
    match partition(&req, seed) {
        Ok(r) => Ok(Split::from_result(r)),
        Err(e) => Err(e),
    }
}

impl Split {
    /// Recovers a split from the fallback assignment of an exhausted run.
    pub fn from_best_effort(err: &PartitionError) -> Option<Split> {
        err.best_effort().cloned().map(Split::from_result)
    }
}

/// Random subset `U' ⊆ A` of relative size about `p1` in which each anchor
/// keeps at least `(1 - 2γ) p1 · min_anchor_degree` neighbours.
pub fn sample_subset(
    g: &HostGraph,
    anchors: &[Vertex],
    source: &[Vertex],
    p1: f64,
    gamma: f64,
    min_anchor_degree: f64,
    seed: u64,
) -> Result<Vec<Vertex>, PartitionError> {
    if p1 >= 1.0 {
        let mut all = source.to_vec();
        all.sort_unstable();
        return Ok(all);
    }
    let req = subset_request(g, anchors, source, p1, gamma, min_anchor_degree)?;
    partition(&req, seed).map(|mut r| r.classes.swap_remove(0))
}

pub(crate) fn subset_request<'a>(
    g: &'a HostGraph,
    anchors: &'a [Vertex],
    source: &'a [Vertex],
    p1: f64,
    gamma: f64,
    min_anchor_degree: f64,
) -> Result<PartitionRequest<'a>, PartitionError> {
    if !(p1 > 0.0) {
        return Err(PartitionError::InvalidRequest(format!("subset fraction {p1} must be positive")));
    }
    Ok(PartitionRequest::new(g, source, anchors, vec![p1, 1.0 - p1], gamma, min_anchor_degree))
}
