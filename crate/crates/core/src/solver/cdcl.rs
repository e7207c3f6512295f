//! Conflict-driven clause learning in the MiniSat mould: two watched
//! literals, first-UIP learning with recursive minimization, VSIDS decision
//! order, phase saving, Luby or LBD-driven restarts, and periodic
//! learnt-clause reduction. Clause literals live in one flat arena and
//! two-literal clauses propagate straight from their watchers.
//!
//! Everything is deterministic. The only randomness is the optional random
//! decision frequency, driven by a seeded xorshift generator.

use std::collections::VecDeque;
use std::time::Instant;

use super::heap::VarHeap;
use super::{Assignment, Budget, SolveError, SolveResult};
use crate::cnf::CnfFormula;

/// Internal literal: `2·var + negated`, with 0-based variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SLit(u32);

impl SLit {
    #[inline]
    fn new(var: usize, negated: bool) -> SLit {
        SLit(((var as u32) << 1) | negated as u32)
    }
    #[inline]
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    #[inline]
    fn negated(self) -> bool {
        self.0 & 1 == 1
    }
    #[inline]
    fn idx(self) -> usize {
        self.0 as usize
    }
    #[inline]
    fn not(self) -> SLit {
        SLit(self.0 ^ 1)
    }
}

const TRUE: i8 = 1;
const FALSE: i8 = -1;
const UNDEF: i8 = 0;

const LBD_WINDOW: usize = 50;
const TRAIL_WINDOW: usize = 5000;
const RESTART_MARGIN: f64 = 0.8;
const BLOCK_MARGIN: f64 = 1.4;
const REDUCE_FIRST: u64 = 2000;
const REDUCE_STEP: u64 = 300;

type CRef = u32;
const NO_REASON: CRef = u32::MAX;
/// Set on watchers of two-literal clauses, whose blocker is the other literal.
const BINARY: CRef = 1 << 31;

/// Clause header; the literals live in `Solver::arena`.
#[derive(Debug, Clone)]
struct Clause {
    start: u32,
    len: u32,
    learnt: bool,
    activity: f64,
    lbd: u32,
}

impl Clause {
    #[inline]
    fn range(&self) -> std::ops::Range<usize> {
        self.start as usize..(self.start + self.len) as usize
    }
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: CRef,
    blocker: SLit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestartPolicy {
    /// Luby sequence scaled by `restart_unit`; learnt limit grows per restart.
    Luby,
    /// Restart when recent learnt clauses have a worse LBD than average,
    /// block restarts when the trail is unusually long, and reduce the
    /// learnt database on a fixed conflict schedule.
    Glucose,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub restart: RestartPolicy,
    pub var_decay: f64,
    pub clause_decay: f64,
    /// Conflicts in the first restart interval; later intervals follow the
    /// Luby sequence scaled by this unit.
    pub restart_unit: u64,
    /// Initial learnt-clause limit as a fraction of the original clauses.
    pub learnt_fraction: f64,
    /// Probability of a random instead of a VSIDS decision.
    pub random_var_freq: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restart: RestartPolicy::Glucose,
            var_decay: 0.95,
            clause_decay: 0.999,
            restart_unit: 100,
            learnt_fraction: 1.0 / 3.0,
            random_var_freq: 0.0,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

enum Search {
    Sat,
    Unsat,
    Restart,
}

pub struct Solver {
    config: SolverConfig,
    num_vars: usize,
    clauses: Vec<Clause>,
    arena: Vec<SLit>,
    num_original: usize,
    watches: Vec<Vec<Watcher>>,
    /// Indexed by literal.
    values: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<CRef>,
    phase: Vec<bool>,
    trail: Vec<SLit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    order: VarHeap,
    seen: Vec<bool>,
    to_clear: Vec<SLit>,
    level_stamp: Vec<u64>,
    stamp: u64,
    max_learnts: f64,
    num_learnts: usize,
    recent_lbd: VecDeque<u32>,
    recent_lbd_sum: u64,
    recent_trail: VecDeque<usize>,
    recent_trail_sum: usize,
    lbd_total: u64,
    next_reduce: u64,
    reductions: u64,
    rng: u64,
    inconsistent: bool,
    stats: SolverStats,
}

impl Solver {
    pub fn new(formula: &CnfFormula, config: SolverConfig) -> Self {
        let n = formula.num_vars() as usize;
        let activity = vec![0.0; n];
        let mut order = VarHeap::new(n);
        for v in 0..n {
            order.insert(v, &activity);
        }
        let mut s = Solver {
            config,
            num_vars: n,
            clauses: Vec::with_capacity(formula.num_clauses()),
            arena: Vec::with_capacity(formula.num_literals()),
            num_original: 0,
            watches: vec![Vec::new(); 2 * n],
            values: vec![UNDEF; 2 * n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            phase: vec![false; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            var_inc: 1.0,
            cla_inc: 1.0,
            order,
            seen: vec![false; n],
            to_clear: Vec::new(),
            level_stamp: vec![0; n + 1],
            stamp: 0,
            max_learnts: 0.0,
            num_learnts: 0,
            recent_lbd: VecDeque::with_capacity(LBD_WINDOW),
            recent_lbd_sum: 0,
            recent_trail: VecDeque::with_capacity(TRAIL_WINDOW),
            recent_trail_sum: 0,
            lbd_total: 0,
            next_reduce: REDUCE_FIRST,
            reductions: 0,
            rng: config.seed | 1,
            inconsistent: false,
            stats: SolverStats::default(),
        };
        for clause in formula.clauses() {
            let lits: Vec<SLit> = clause
                .lits()
                .iter()
                .map(|l| SLit::new(l.var() as usize - 1, !l.is_positive()))
                .collect();
            s.add_original(lits);
        }
        s.num_original = s.clauses.len();
        s.max_learnts = (s.num_original as f64 * config.learnt_fraction).max(500.0);
        s
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    fn add_original(&mut self, lits: Vec<SLit>) {
        if self.inconsistent {
            return;
        }
        match lits[..] {
            [] => self.inconsistent = true,
            [unit] => match self.lit_value(unit) {
                TRUE => {}
                FALSE => self.inconsistent = true,
                _ => self.enqueue(unit, NO_REASON),
            },
            _ => {
                let cref = self.push_clause(&lits, false, 0);
                self.attach(cref);
            }
        }
    }

    #[inline]
    fn lit_value(&self, l: SLit) -> i8 {
        self.values[l.idx()]
    }

    #[inline]
    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn push_clause(&mut self, lits: &[SLit], learnt: bool, lbd: u32) -> CRef {
        let cref = self.clauses.len() as CRef;
        self.clauses.push(Clause {
            start: self.arena.len() as u32,
            len: lits.len() as u32,
            learnt,
            activity: 0.0,
            lbd,
        });
        self.arena.extend_from_slice(lits);
        cref
    }

    fn attach(&mut self, cref: CRef) {
        let c = &self.clauses[cref as usize];
        let (a, b) = (self.arena[c.start as usize], self.arena[c.start as usize + 1]);
        let tagged = if c.len == 2 { cref | BINARY } else { cref };
        self.watches[a.not().idx()].push(Watcher { cref: tagged, blocker: b });
        self.watches[b.not().idx()].push(Watcher { cref: tagged, blocker: a });
    }

    #[inline]
    fn enqueue(&mut self, l: SLit, reason: CRef) {
        debug_assert_eq!(self.lit_value(l), UNDEF);
        self.values[l.idx()] = TRUE;
        self.values[l.not().idx()] = FALSE;
        let v = l.var();
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation over the watch lists; returns a conflicting clause.
    fn propagate(&mut self) -> Option<CRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p.not();
            let mut ws = std::mem::take(&mut self.watches[p.idx()]);
            let mut i = 0;
            let mut j = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                let blocker_value = self.values[w.blocker.idx()];
                if blocker_value == TRUE {
                    ws[j] = w;
                    j += 1;
                    i += 1;
                    continue;
                }
                if w.cref & BINARY != 0 {
                    ws[j] = w;
                    j += 1;
                    i += 1;
                    let cref = w.cref & !BINARY;
                    if blocker_value == FALSE {
                        conflict = Some(cref);
                        self.qhead = self.trail.len();
                        while i < ws.len() {
                            ws[j] = ws[i];
                            j += 1;
                            i += 1;
                        }
                    } else {
                        self.enqueue(w.blocker, cref);
                    }
                    continue;
                }
                i += 1;
                let cref = w.cref;
                let lits = &mut self.arena[self.clauses[cref as usize].range()];
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let kept = Watcher {
                    cref,
                    blocker: first,
                };
                if first != w.blocker && self.values[first.idx()] == TRUE {
                    ws[j] = kept;
                    j += 1;
                    continue;
                }
                for k in 2..lits.len() {
                    if self.values[lits[k].idx()] != FALSE {
                        lits.swap(1, k);
                        let moved_to = lits[1].not().idx();
                        self.watches[moved_to].push(kept);
                        continue 'watchers;
                    }
                }
                ws[j] = kept;
                j += 1;
                if self.values[first.idx()] == FALSE {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, cref);
                }
            }
            ws.truncate(j);
            self.watches[p.idx()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: CRef) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    #[inline]
    fn abstract_level(&self, v: usize) -> u32 {
        1 << (self.level[v] & 31)
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: CRef) -> (Vec<SLit>, u32) {
        let mut learnt = vec![SLit(0)];
        let mut pending = 0usize;
        let mut p: Option<SLit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level();

        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            // Binary reasons may hold the implied literal in either slot.
            let implied = p.map_or(usize::MAX, SLit::var);
            for k in self.clauses[confl as usize].range() {
                let q = self.arena[k];
                let v = q.var();
                if v != implied && !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            confl = self.reason[lit.var()];
            self.seen[lit.var()] = false;
            pending -= 1;
            if pending == 0 {
                break;
            }
        }
        learnt[0] = p.expect("conflict involves the current level").not();

        // Recursive minimization.
        self.to_clear.clear();
        self.to_clear.extend_from_slice(&learnt);
        let levels = learnt[1..]
            .iter()
            .fold(0u32, |acc, l| acc | self.abstract_level(l.var()));
        let mut kept = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reason[l.var()] == NO_REASON || !self.redundant(l, levels) {
                learnt[kept] = l;
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for l in std::mem::take(&mut self.to_clear) {
            self.seen[l.var()] = false;
        }

        let backjump = if learnt.len() == 1 {
            0
        } else {
            let (best, _) = learnt
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(i, l)| (self.level[l.var()], std::cmp::Reverse(*i)))
                .expect("at least two literals");
            learnt.swap(1, best);
            self.level[learnt[1].var()]
        };
        (learnt, backjump)
    }

    /// Whether `p` is implied by other literals of the learnt clause.
    fn redundant(&mut self, p: SLit, levels: u32) -> bool {
        let top = self.to_clear.len();
        let mut stack = vec![p];
        while let Some(q) = stack.pop() {
            let cref = self.reason[q.var()];
            for k in self.clauses[cref as usize].range() {
                let l = self.arena[k];
                let v = l.var();
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v] != NO_REASON && self.abstract_level(v) & levels != 0 {
                    self.seen[v] = true;
                    stack.push(l);
                    self.to_clear.push(l);
                } else {
                    for l in self.to_clear.drain(top..) {
                        self.seen[l.var()] = false;
                    }
                    return false;
                }
            }
        }
        true
    }

    fn lbd(&mut self, lits: &[SLit]) -> u32 {
        self.stamp += 1;
        let mut count = 0;
        for l in lits {
            let lvl = self.level[l.var()] as usize;
            if self.level_stamp[lvl] != self.stamp {
                self.level_stamp[lvl] = self.stamp;
                count += 1;
            }
        }
        count
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.values[l.idx()] = UNDEF;
            self.values[l.not().idx()] = UNDEF;
            self.reason[v] = NO_REASON;
            self.phase[v] = !l.negated();
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn next_random(&mut self) -> u64 {
        let mut x = self.rng;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.rng = x;
        x
    }

    fn pick_branch(&mut self) -> Option<SLit> {
        if self.config.random_var_freq > 0.0 && self.num_vars > 0 {
            let r = (self.next_random() >> 11) as f64 / (1u64 << 53) as f64;
            if r < self.config.random_var_freq {
                let v = (self.next_random() % self.num_vars as u64) as usize;
                if self.lit_value(SLit::new(v, false)) == UNDEF {
                    return Some(SLit::new(v, !self.phase[v]));
                }
            }
        }
        while let Some(v) = self.order.pop(&self.activity) {
            if self.lit_value(SLit::new(v, false)) == UNDEF {
                return Some(SLit::new(v, !self.phase[v]));
            }
        }
        None
    }

    fn locked(&self, cref: CRef) -> bool {
        let first = self.arena[self.clauses[cref as usize].start as usize];
        self.reason[first.var()] == cref && self.lit_value(first) == TRUE
    }

    /// Drops half of the learnt clauses, sparing glue clauses (LBD ≤ 2),
    /// binaries, and reasons of current assignments; then compacts storage.
    fn reduce_learnts(&mut self) {
        let mut candidates: Vec<CRef> = (self.num_original..self.clauses.len())
            .map(|i| i as CRef)
            .filter(|&c| {
                let cl = &self.clauses[c as usize];
                cl.lbd > 2 && cl.len > 2 && !self.locked(c)
            })
            .collect();
        candidates.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.total_cmp(&cb.activity))
                .then(a.cmp(&b))
        });
        let mut remove = vec![false; self.clauses.len()];
        for &c in &candidates[..candidates.len() / 2] {
            remove[c as usize] = true;
        }

        let mut remap = vec![NO_REASON; self.clauses.len()];
        let mut kept = Vec::with_capacity(self.clauses.len());
        let mut arena = Vec::with_capacity(self.arena.len());
        for (i, mut c) in std::mem::take(&mut self.clauses).into_iter().enumerate() {
            if !remove[i] {
                remap[i] = kept.len() as CRef;
                let range = c.range();
                c.start = arena.len() as u32;
                arena.extend_from_slice(&self.arena[range]);
                kept.push(c);
            }
        }
        self.clauses = kept;
        self.arena = arena;
        self.num_learnts = self.clauses.len() - self.num_original;
        for l in &self.trail {
            let r = &mut self.reason[l.var()];
            if *r != NO_REASON {
                *r = remap[*r as usize];
                debug_assert_ne!(*r, NO_REASON);
            }
        }
        for w in &mut self.watches {
            w.clear();
        }
        for cref in 0..self.clauses.len() {
            self.attach(cref as CRef);
        }
    }

    /// Blocks an imminent restart when the solver seems close to a model.
    fn note_trail_at_conflict(&mut self) {
        let len = self.trail.len();
        if self.stats.conflicts > 10_000
            && self.recent_lbd.len() == LBD_WINDOW
            && self.recent_trail.len() == TRAIL_WINDOW
            && len as f64 > BLOCK_MARGIN * self.recent_trail_sum as f64 / TRAIL_WINDOW as f64
        {
            self.recent_lbd.clear();
            self.recent_lbd_sum = 0;
        }
        if self.recent_trail.len() == TRAIL_WINDOW {
            self.recent_trail_sum -= self.recent_trail.pop_front().expect("full window");
        }
        self.recent_trail.push_back(len);
        self.recent_trail_sum += len;
    }

    fn note_lbd(&mut self, lbd: u32) {
        self.lbd_total += lbd as u64;
        if self.recent_lbd.len() == LBD_WINDOW {
            self.recent_lbd_sum -= self.recent_lbd.pop_front().expect("full window") as u64;
        }
        self.recent_lbd.push_back(lbd);
        self.recent_lbd_sum += lbd as u64;
    }

    fn lbd_trending_up(&self) -> bool {
        self.recent_lbd.len() == LBD_WINDOW
            && RESTART_MARGIN * (self.recent_lbd_sum as f64 / LBD_WINDOW as f64)
                > self.lbd_total as f64 / self.stats.conflicts as f64
    }

    fn search(&mut self, conflict_limit: u64, budget: &Budget, started: Instant) -> Result<Search, SolveError> {
        let mut conflicts_here = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_here += 1;
                if self.decision_level() == 0 {
                    return Ok(Search::Unsat);
                }
                if self.config.restart == RestartPolicy::Glucose {
                    self.note_trail_at_conflict();
                }
                let (learnt, backjump) = self.analyze(confl);
                let lbd = self.lbd(&learnt);
                if self.config.restart == RestartPolicy::Glucose {
                    self.note_lbd(lbd);
                }
                self.cancel_until(backjump);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let cref = self.push_clause(&learnt, true, lbd);
                    let asserting = learnt[0];
                    self.num_learnts += 1;
                    self.attach(cref);
                    self.bump_clause(cref);
                    self.enqueue(asserting, cref);
                }
                self.var_inc /= self.config.var_decay;
                self.cla_inc /= self.config.clause_decay;

                if budget.conflicts.is_some_and(|limit| self.stats.conflicts >= limit)
                    || (self.stats.conflicts % 256 == 0
                        && budget.time.is_some_and(|t| started.elapsed() >= t))
                {
                    return Err(SolveError::BudgetExceeded {
                        conflicts: self.stats.conflicts,
                    });
                }
            } else {
                let (restart, reduce) = match self.config.restart {
                    RestartPolicy::Luby => (
                        conflicts_here >= conflict_limit,
                        self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64,
                    ),
                    RestartPolicy::Glucose => {
                        (self.lbd_trending_up(), self.stats.conflicts >= self.next_reduce)
                    }
                };
                if restart {
                    self.recent_lbd.clear();
                    self.recent_lbd_sum = 0;
                    self.cancel_until(0);
                    return Ok(Search::Restart);
                }
                if reduce {
                    self.reductions += 1;
                    self.next_reduce =
                        self.stats.conflicts + REDUCE_FIRST + REDUCE_STEP * self.reductions;
                    self.reduce_learnts();
                }
                match self.pick_branch() {
                    None => return Ok(Search::Sat),
                    Some(lit) => {
                        self.stats.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(lit, NO_REASON);
                    }
                }
            }
        }
    }

    pub fn solve(&mut self, budget: Budget) -> Result<SolveResult, SolveError> {
        if self.inconsistent {
            return Ok(SolveResult::Unsat);
        }
        let started = Instant::now();
        if self.propagate().is_some() {
            self.inconsistent = true;
            return Ok(SolveResult::Unsat);
        }
        let mut round = 0u64;
        loop {
            let limit = luby(2.0, round) as u64 * self.config.restart_unit;
            match self.search(limit, &budget, started)? {
                Search::Sat => {
                    let values = (0..self.num_vars)
                        .map(|v| self.lit_value(SLit::new(v, false)) == TRUE)
                        .collect();
                    self.cancel_until(0);
                    return Ok(SolveResult::Sat(Assignment::from_values(values)));
                }
                Search::Unsat => {
                    self.inconsistent = true;
                    return Ok(SolveResult::Unsat);
                }
                Search::Restart => {
                    round += 1;
                    self.stats.restarts += 1;
                    self.max_learnts *= 1.05;
                }
            }
        }
    }
}

/// The Luby restart sequence 1, 1, 2, 1, 1, 2, 4, … scaled by powers of `y`.
fn luby(y: f64, mut x: u64) -> f64 {
    let mut size = 1u64;
    let mut seq = 0i32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}
