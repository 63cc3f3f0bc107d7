use serde::{Deserialize, Serialize};

use super::detector::{DriftDetector, PageHinkley, PageHinkleyConfig};
use super::{Regressor, StateHasher};
use crate::stream::ColumnKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// Instance weight a leaf accumulates between split attempts.
    pub grace_period: f64,
    /// δ of the Hoeffding bound.
    pub split_confidence: f64,
    /// Split anyway once the bound falls below this (near-tied candidates).
    pub tie_threshold: f64,
    /// Equal-width histogram bins per numeric feature and leaf.
    pub num_bins: usize,
    /// Per-split-node change detection on absolute error; `None` disables it.
    pub drift_detection: Option<PageHinkleyConfig>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            grace_period: 200.0,
            split_confidence: 0.01,
            tie_threshold: 0.05,
            num_bins: 64,
            drift_detection: Some(PageHinkleyConfig::default()),
        }
    }
}

/// Hoeffding bound `sqrt(R² ln(1/δ) / 2n)`.
pub fn hoeffding_bound(range: f64, confidence: f64, n: f64) -> f64 {
    (range * range * (1.0 / confidence).ln() / (2.0 * n)).sqrt()
}

/// Weighted count, mean and sum of squared deviations (Welford / Chan).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Moments {
    pub w: f64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    fn add(&mut self, y: f64, w: f64) {
        let total = self.w + w;
        let delta = y - self.mean;
        self.mean += delta * w / total;
        self.m2 += w * delta * (y - self.mean);
        self.w = total;
    }

    fn merge(&mut self, o: &Moments) {
        if o.w <= 0.0 {
            return;
        }
        if self.w <= 0.0 {
            *self = *o;
            return;
        }
        let total = self.w + o.w;
        let delta = o.mean - self.mean;
        self.mean += delta * o.w / total;
        self.m2 += o.m2 + delta * delta * self.w * o.w / total;
        self.w = total;
    }

    fn sd(&self) -> f64 {
        if self.w > 0.0 {
            (self.m2.max(0.0) / self.w).sqrt()
        } else {
            0.0
        }
    }

    fn hash_into(&self, h: &mut StateHasher) {
        h.f64(self.w);
        h.f64(self.mean);
        h.f64(self.m2);
    }
}

fn sdr(total: &Moments, left: &Moments, right: &Moments) -> f64 {
    total.sd() - (left.w / total.w) * left.sd() - (right.w / total.w) * right.sd()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Test {
    /// left when `x < threshold`
    Less(f64),
    /// left when `x == code`
    Equals(f64),
}

impl Test {
    fn goes_left(&self, v: f64) -> bool {
        match *self {
            Test::Less(t) => v < t,
            Test::Equals(c) => v == c,
        }
    }
}

/// Numeric attribute observer: buffers raw values until its first split
/// evaluation, then fixes 64 equal-width bins over the buffered min/max.
/// Later values outside the range land in the end bins, which keeps every
/// bin boundary an exact `x < threshold` partition of the observed sample.
#[derive(Debug, Clone)]
struct NumericObserver {
    pending: Vec<(f64, f64, f64)>,
    edges: Vec<f64>,
    bins: Vec<Moments>,
    fixed: bool,
}

impl NumericObserver {
    fn new() -> Self {
        Self {
            pending: Vec::new(),
            edges: Vec::new(),
            bins: Vec::new(),
            fixed: false,
        }
    }

    fn observe(&mut self, x: f64, y: f64, w: f64) {
        if self.fixed {
            let b = self.edges.partition_point(|&e| e <= x);
            self.bins[b].add(y, w);
        } else {
            self.pending.push((x, y, w));
        }
    }

    /// Fixes the bins once the buffer shows spread, or unconditionally when
    /// `force` is set (a constant buffer then yields a single bin).
    fn fix(&mut self, num_bins: usize, force: bool) {
        if self.fixed {
            return;
        }
        let (lo, hi) = self
            .pending
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.0), hi.max(p.0))
            });
        if hi > lo {
            let width = hi - lo;
            self.edges = (1..num_bins)
                .map(|j| lo + width * j as f64 / num_bins as f64)
                .collect();
            self.edges.dedup();
        } else if !force {
            return;
        }
        self.bins = vec![Moments::default(); self.edges.len() + 1];
        self.fixed = true;
        for (x, y, w) in std::mem::take(&mut self.pending) {
            self.observe(x, y, w);
        }
    }

    /// `(threshold, sdr, left, right)` for every interior bin edge with both
    /// sides non-empty.
    fn candidates(&self, total: &Moments) -> Vec<(f64, f64, Moments, Moments)> {
        if !self.fixed || self.edges.is_empty() {
            return Vec::new();
        }
        let mut suffix = vec![Moments::default(); self.bins.len() + 1];
        for b in (0..self.bins.len()).rev() {
            let mut s = suffix[b + 1];
            s.merge(&self.bins[b]);
            suffix[b] = s;
        }
        let mut left = Moments::default();
        let mut out = Vec::new();
        for (j, &edge) in self.edges.iter().enumerate() {
            left.merge(&self.bins[j]);
            let right = suffix[j + 1];
            if left.w > 0.0 && right.w > 0.0 {
                out.push((edge, sdr(total, &left, &right), left, right));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
struct CategoricalObserver {
    per_code: Vec<Moments>,
}

impl CategoricalObserver {
    fn observe(&mut self, code: f64, y: f64, w: f64) {
        let c = code as usize;
        if c >= self.per_code.len() {
            self.per_code.resize(c + 1, Moments::default());
        }
        self.per_code[c].add(y, w);
    }

    fn candidates(&self, total: &Moments) -> Vec<(f64, f64, Moments, Moments)> {
        let mut out = Vec::new();
        for (c, m) in self.per_code.iter().enumerate() {
            if m.w <= 0.0 || m.w >= total.w {
                continue;
            }
            let mut rest = Moments::default();
            for (o, om) in self.per_code.iter().enumerate() {
                if o != c {
                    rest.merge(om);
                }
            }
            if rest.w > 0.0 {
                out.push((c as f64, sdr(total, m, &rest), *m, rest));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
enum Observer {
    Numeric(NumericObserver),
    Categorical(CategoricalObserver),
}

#[derive(Debug, Clone)]
struct Leaf {
    id: u64,
    stats: Moments,
    prior: f64,
    centroid: Vec<f64>,
    observers: Vec<Observer>,
    weight_at_last_attempt: f64,
}

impl Leaf {
    fn new(id: u64, prior: f64, kinds: &[ColumnKind]) -> Self {
        Self {
            id,
            stats: Moments::default(),
            prior,
            centroid: vec![0.0; kinds.len()],
            observers: kinds
                .iter()
                .map(|k| match k {
                    ColumnKind::Numeric => Observer::Numeric(NumericObserver::new()),
                    ColumnKind::Categorical => {
                        Observer::Categorical(CategoricalObserver::default())
                    }
                })
                .collect(),
            weight_at_last_attempt: 0.0,
        }
    }

    fn prediction(&self) -> f64 {
        if self.stats.w > 0.0 {
            self.stats.mean
        } else {
            self.prior
        }
    }

    fn learn(&mut self, x: &[f64], y: f64, w: f64) {
        self.stats.add(y, w);
        let frac = w / self.stats.w;
        for (c, v) in self.centroid.iter_mut().zip(x) {
            *c += (v - *c) * frac;
        }
        for (obs, &v) in self.observers.iter_mut().zip(x) {
            match obs {
                Observer::Numeric(o) => o.observe(v, y, w),
                Observer::Categorical(o) => o.observe(v, y, w),
            }
        }
    }

    fn candidates(&mut self, config: &TreeConfig) -> Vec<SplitChoice> {
        let force = self.stats.w >= 4.0 * config.grace_period;
        let total = self.stats;
        let mut best_per_feature = Vec::new();
        for (f, obs) in self.observers.iter_mut().enumerate() {
            let cands = match obs {
                Observer::Numeric(o) => {
                    o.fix(config.num_bins, force);
                    o.candidates(&total)
                        .into_iter()
                        .map(|(t, s, l, r)| (Test::Less(t), s, l, r))
                        .collect::<Vec<_>>()
                }
                Observer::Categorical(o) => o
                    .candidates(&total)
                    .into_iter()
                    .map(|(c, s, l, r)| (Test::Equals(c), s, l, r))
                    .collect(),
            };
            // first maximum wins, so lower thresholds break ties
            let best = cands
                .into_iter()
                .fold(None::<(Test, f64, Moments, Moments)>, |acc, c| match acc {
                    Some(a) if a.1 >= c.1 => Some(a),
                    _ => Some(c),
                });
            if let Some((test, merit, left, right)) = best {
                best_per_feature.push(SplitChoice {
                    feature: f,
                    test,
                    merit,
                    left,
                    right,
                });
            }
        }
        best_per_feature
    }

    fn hash_into(&self, h: &mut StateHasher) {
        h.u64(self.id);
        self.stats.hash_into(h);
        h.f64(self.prior);
        h.slice(&self.centroid);
        h.f64(self.weight_at_last_attempt);
        for obs in &self.observers {
            match obs {
                Observer::Numeric(o) => {
                    h.usize(o.pending.len());
                    for (x, y, w) in &o.pending {
                        h.f64(*x);
                        h.f64(*y);
                        h.f64(*w);
                    }
                    h.slice(&o.edges);
                    o.bins.iter().for_each(|b| b.hash_into(h));
                }
                Observer::Categorical(o) => o.per_code.iter().for_each(|b| b.hash_into(h)),
            }
        }
    }
}

struct SplitChoice {
    feature: usize,
    test: Test,
    merit: f64,
    left: Moments,
    right: Moments,
}

#[derive(Debug, Clone)]
struct Split {
    feature: usize,
    test: Test,
    stats: Moments,
    detector: Option<PageHinkley>,
    left: Box<Node>,
    right: Box<Node>,
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(Leaf),
    Split(Split),
}

/// Leaf reached by an instance.
#[derive(Debug, Clone, Copy)]
pub struct LeafInfo<'a> {
    pub id: u64,
    pub weight: f64,
    pub mean: f64,
    pub prediction: f64,
    /// Running weighted mean of the feature vectors routed here.
    pub centroid: &'a [f64],
}

/// Numeric split candidate of a leaf: left branch is `x < threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub sdr: f64,
}

/// Incremental regression tree with variance-reduction splits and leaf-mean
/// predictions.
///
/// A leaf evaluates splits every `grace_period` units of weight. The best
/// split per feature is ranked by standard deviation reduction (SDR); the
/// leaf splits when `SDR₂ / SDR₁ < 1 − ε` with ε the Hoeffding bound for
/// R = 1, or when ε drops below the tie threshold. Each split node runs a
/// Page–Hinkley test on the absolute error of instances passing through it
/// and is replaced by a fresh leaf when it fires.
#[derive(Debug, Clone)]
pub struct FimtTree {
    config: TreeConfig,
    kinds: Vec<ColumnKind>,
    root: Box<Node>,
    next_id: u64,
    resets: usize,
}

struct Ctx<'a> {
    config: &'a TreeConfig,
    kinds: &'a [ColumnKind],
    next_id: &'a mut u64,
    resets: &'a mut usize,
}

impl Ctx<'_> {
    fn fresh_leaf(&mut self, prior: f64) -> Leaf {
        let id = *self.next_id;
        *self.next_id += 1;
        Leaf::new(id, prior, self.kinds)
    }
}

impl FimtTree {
    pub fn new(config: TreeConfig, kinds: Vec<ColumnKind>) -> Self {
        let root = Box::new(Node::Leaf(Leaf::new(0, 0.0, &kinds)));
        Self {
            config,
            kinds,
            root,
            next_id: 1,
            resets: 0,
        }
    }

    pub fn numeric(config: TreeConfig, num_features: usize) -> Self {
        Self::new(config, vec![ColumnKind::Numeric; num_features])
    }

    pub fn config(&self) -> &TreeConfig {
        &self.config
    }

    pub fn kinds(&self) -> &[ColumnKind] {
        &self.kinds
    }

    fn leaf_for(&self, x: &[f64]) -> &Leaf {
        let mut node = &*self.root;
        loop {
            match node {
                Node::Leaf(l) => return l,
                Node::Split(s) => {
                    node = if s.test.goes_left(x[s.feature]) {
                        &s.left
                    } else {
                        &s.right
                    };
                }
            }
        }
    }

    pub fn leaf(&self, x: &[f64]) -> LeafInfo<'_> {
        let l = self.leaf_for(x);
        LeafInfo {
            id: l.id,
            weight: l.stats.w,
            mean: l.stats.mean,
            prediction: l.prediction(),
            centroid: &l.centroid,
        }
    }

    /// Numeric split candidates currently held by the leaf `x` reaches.
    /// Empty until the leaf's first split evaluation fixes its bins.
    pub fn split_candidates(&self, x: &[f64]) -> Vec<SplitCandidate> {
        let l = self.leaf_for(x);
        let mut out = Vec::new();
        for (f, obs) in l.observers.iter().enumerate() {
            if let Observer::Numeric(o) = obs {
                for (threshold, sdr, _, _) in o.candidates(&l.stats) {
                    out.push(SplitCandidate {
                        feature: f,
                        threshold,
                        sdr,
                    });
                }
            }
        }
        out
    }

    /// `(feature, threshold)` of every numeric split node, pre-order.
    pub fn numeric_splits(&self) -> Vec<(usize, f64)> {
        fn walk(n: &Node, out: &mut Vec<(usize, f64)>) {
            if let Node::Split(s) = n {
                if let Test::Less(t) = s.test {
                    out.push((s.feature, t));
                }
                walk(&s.left, out);
                walk(&s.right, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn num_leaves(&self) -> usize {
        fn count(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 1,
                Node::Split(s) => count(&s.left) + count(&s.right),
            }
        }
        count(&self.root)
    }

    pub fn depth(&self) -> usize {
        fn depth(n: &Node) -> usize {
            match n {
                Node::Leaf(_) => 0,
                Node::Split(s) => 1 + depth(&s.left).max(depth(&s.right)),
            }
        }
        depth(&self.root)
    }

    /// Subtrees replaced after a drift alarm.
    pub fn resets(&self) -> usize {
        self.resets
    }

    pub fn learn_weighted(&mut self, x: &[f64], y: f64, weight: f64) {
        if weight <= 0.0 {
            return;
        }
        let err = (y - self.predict(x)).abs();
        let mut ctx = Ctx {
            config: &self.config,
            kinds: &self.kinds,
            next_id: &mut self.next_id,
            resets: &mut self.resets,
        };
        learn_at(&mut ctx, &mut self.root, x, y, weight, err);
    }

    pub(crate) fn hash_into(&self, h: &mut StateHasher) {
        fn walk(n: &Node, h: &mut StateHasher) {
            match n {
                Node::Leaf(l) => {
                    h.u64(0);
                    l.hash_into(h);
                }
                Node::Split(s) => {
                    h.u64(1);
                    h.usize(s.feature);
                    match s.test {
                        Test::Less(t) => h.f64(t),
                        Test::Equals(c) => h.f64(-c - 1.0),
                    }
                    s.stats.hash_into(h);
                    if let Some(d) = &s.detector {
                        d.hash_into(h);
                    }
                    walk(&s.left, h);
                    walk(&s.right, h);
                }
            }
        }
        h.u64(self.next_id);
        h.usize(self.resets);
        walk(&self.root, h);
    }
}

fn learn_at(ctx: &mut Ctx<'_>, node: &mut Node, x: &[f64], y: f64, w: f64, err: f64) {
    let replacement = match node {
        Node::Split(s) => {
            s.stats.add(y, w);
            let alarm = s.detector.as_mut().is_some_and(|d| d.update(err));
            if alarm {
                *ctx.resets += 1;
                let prior = s.stats.mean;
                let mut leaf = ctx.fresh_leaf(prior);
                leaf.learn(x, y, w);
                Some(Node::Leaf(leaf))
            } else {
                let child = if s.test.goes_left(x[s.feature]) {
                    &mut s.left
                } else {
                    &mut s.right
                };
                learn_at(ctx, child, x, y, w, err);
                None
            }
        }
        Node::Leaf(leaf) => {
            leaf.learn(x, y, w);
            if leaf.stats.w - leaf.weight_at_last_attempt >= ctx.config.grace_period {
                leaf.weight_at_last_attempt = leaf.stats.w;
                try_split(ctx, leaf)
            } else {
                None
            }
        }
    };
    if let Some(r) = replacement {
        *node = r;
    }
}

fn try_split(ctx: &mut Ctx<'_>, leaf: &mut Leaf) -> Option<Node> {
    let mut cands = leaf.candidates(ctx.config);
    cands.sort_by(|a, b| b.merit.total_cmp(&a.merit));
    let best = cands.first()?;
    if best.merit <= 0.0 {
        return None;
    }
    let second = cands.get(1).map_or(0.0, |c| c.merit.max(0.0));
    let eps = hoeffding_bound(1.0, ctx.config.split_confidence, leaf.stats.w);
    if second / best.merit >= 1.0 - eps && eps >= ctx.config.tie_threshold {
        return None;
    }
    let best = cands.swap_remove(0);
    let left = ctx.fresh_leaf(best.left.mean);
    let right = ctx.fresh_leaf(best.right.mean);
    Some(Node::Split(Split {
        feature: best.feature,
        test: best.test,
        stats: leaf.stats,
        detector: ctx.config.drift_detection.map(PageHinkley::new),
        left: Box::new(Node::Leaf(left)),
        right: Box::new(Node::Leaf(right)),
    }))
}

impl Regressor for FimtTree {
    fn predict(&self, x: &[f64]) -> f64 {
        self.leaf_for(x).prediction()
    }

    fn learn(&mut self, x: &[f64], y: f64) {
        self.learn_weighted(x, y, 1.0)
    }

    fn state_hash(&self) -> u64 {
        let mut h = StateHasher::default();
        self.hash_into(&mut h);
        h.finish()
    }
}
