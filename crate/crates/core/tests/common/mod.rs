//! Reference implementations shared by the integration tests. None of them
//! use the engine; they exist to check it.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use ittm_core::asm::assemble;
use ittm_core::{Config, LimitConvention, Ordinal, Overlay, Program, RealTape};
use num_bigint::BigUint;
use rand::Rng;

/// A random program with `states` working states; each transition goes to
/// `HALT` with probability `halt_p`.
pub fn random_program(rng: &mut impl Rng, states: usize, halt_p: f64) -> Program {
    let names: Vec<String> = (0..states).map(|i| format!("s{i}")).collect();
    let mut src = format!(".states {}\n", names.join(" "));
    for name in &names {
        for bits in 0..8u8 {
            let pat: String = (0..3)
                .map(|i| if bits >> (2 - i) & 1 == 1 { '1' } else { '0' })
                .collect();
            let w: String = (0..2)
                .map(|_| ['0', '1', '_'][rng.gen_range(0..3)])
                .collect();
            let mv = if rng.gen_bool(0.5) { 'L' } else { 'R' };
            let next = if rng.gen_bool(halt_p) {
                "HALT"
            } else {
                &names[rng.gen_range(0..states)]
            };
            let _ = writeln!(src, "{name} {pat} -> {w} {mv} {next}");
        }
    }
    assemble(&src).unwrap()
}

/// Cells 1 throughout, cells 1 somewhere, and head/state minima over a
/// stretch of stages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub all_work: Overlay,
    pub all_out: Overlay,
    pub any_work: Overlay,
    pub any_out: Overlay,
    pub min_head: usize,
    pub min_state: usize,
}

impl Span {
    pub fn of(c: &Config) -> Span {
        Span {
            all_work: c.work.clone(),
            all_out: c.output.clone(),
            any_work: c.work.clone(),
            any_out: c.output.clone(),
            min_head: c.head,
            min_state: c.state,
        }
    }

    pub fn join(&mut self, o: &Span) {
        self.all_work.intersect_with(&o.all_work);
        self.all_out.intersect_with(&o.all_out);
        self.any_work.union_with(&o.any_work);
        self.any_out.union_with(&o.any_out);
        self.min_head = self.min_head.min(o.min_head);
        self.min_state = self.min_state.min(o.min_state);
    }

    pub fn limit(&self, conv: LimitConvention, p: &Program) -> Config {
        match conv {
            LimitConvention::LiminfCells => Config {
                state: self.min_state,
                head: self.min_head,
                work: self.all_work.clone(),
                output: self.all_out.clone(),
            },
            LimitConvention::HamkinsLewis => Config {
                state: p.limit_state(),
                head: 0,
                work: self.any_work.clone(),
                output: self.any_out.clone(),
            },
        }
    }
}

/// One limit computed by the unroller.
#[derive(Clone, Debug)]
pub struct OracleLimit {
    pub order: u32,
    pub config: Config,
    /// Summary of the 10 unrolled periods the limit was taken over.
    pub span: Span,
    /// For order 1: the configurations before the cycle and one cycle.
    pub pre: Vec<Config>,
    pub cycle: Vec<Config>,
}

#[derive(Debug, PartialEq, Eq)]
pub struct GaveUp;

/// Naive transfinite simulator. A block of order `k` is the stretch from a
/// stage to that stage plus `w^k`; its limit is found by running sub-blocks
/// until their start configurations repeat and then unrolling ten more full
/// periods and taking the limit over those.
pub struct Unroller<'a> {
    pub program: &'a Program,
    pub input: &'a RealTape,
    pub conv: LimitConvention,
    pub steps_left: u64,
    pub limits: HashMap<Ordinal, OracleLimit>,
    pub halted: Option<(Ordinal, Config)>,
}

pub const UNROLL_PERIODS: usize = 10;

impl<'a> Unroller<'a> {
    pub fn new(
        program: &'a Program,
        input: &'a RealTape,
        conv: LimitConvention,
        steps: u64,
    ) -> Self {
        Unroller {
            program,
            input,
            conv,
            steps_left: steps,
            limits: HashMap::new(),
            halted: None,
        }
    }

    /// Runs the block of order `k` from `stage`; `None` if the machine halts
    /// inside it or at its end.
    pub fn block(
        &mut self,
        k: u32,
        stage: &Ordinal,
        c: Config,
    ) -> Result<Option<(Config, Span)>, GaveUp> {
        if self.program.is_halting(c.state) {
            self.halted = Some((stage.clone(), c));
            return Ok(None);
        }
        if k == 0 {
            if self.steps_left == 0 {
                return Err(GaveUp);
            }
            self.steps_left -= 1;
            let span = Span::of(&c);
            let mut next = c;
            let bit = self.input.read(next.head);
            next.apply(self.program, bit).expect("not halting");
            return Ok(Some((next, span)));
        }
        let unit = Ordinal::omega_pow_n(u64::from(k - 1));
        let mut starts: Vec<Config> = Vec::new();
        let mut seen: HashMap<Config, usize> = HashMap::new();
        let mut spans: Vec<Span> = Vec::new();
        let mut cur = c;
        let mut i = 0usize;
        let (first, period) = loop {
            if let Some(&j) = seen.get(&cur) {
                break (j, i - j);
            }
            seen.insert(cur.clone(), i);
            starts.push(cur.clone());
            let at = stage.add(&unit.mul(&Ordinal::from_u64(i as u64)));
            match self.block(k - 1, &at, cur)? {
                Some((next, span)) => {
                    spans.push(span);
                    cur = next;
                }
                None => return Ok(None),
            }
            i += 1;
        };
        let mut whole = spans[0].clone();
        for s in &spans[1..] {
            whole.join(s);
        }
        let mut tail: Option<Span> = None;
        for t in 0..UNROLL_PERIODS * period {
            assert_eq!(cur, starts[first + t % period], "run is not periodic");
            let at = stage.add(&unit.mul(&Ordinal::from_u64((i + t) as u64)));
            let (next, span) = self.block(k - 1, &at, cur)?.expect("periodic run halted");
            match &mut tail {
                Some(s) => s.join(&span),
                None => tail = Some(span),
            }
            cur = next;
        }
        let tail = tail.expect("period is positive");
        let limit = tail.limit(self.conv, self.program);
        let at = stage.add(&Ordinal::omega_pow_n(u64::from(k)));
        let (pre, cycle) = if k == 1 {
            (starts[..first].to_vec(), starts[first..].to_vec())
        } else {
            (Vec::new(), Vec::new())
        };
        self.limits.insert(
            at.clone(),
            OracleLimit {
                order: k,
                config: limit.clone(),
                span: tail,
                pre,
                cycle,
            },
        );
        if self.program.is_halting(limit.state) {
            self.halted = Some((at, limit));
            return Ok(None);
        }
        Ok(Some((limit, whole)))
    }

    /// Runs the span of length `len` (finite exponents only) from `stage`.
    pub fn span(
        &mut self,
        stage: &Ordinal,
        c: Config,
        len: &Ordinal,
    ) -> Result<Option<(Config, Span)>, GaveUp> {
        let mut at = stage.clone();
        let mut cur = c;
        let mut total: Option<Span> = None;
        for (e, coeff) in len.terms() {
            let k = e.to_u64().expect("finite exponent") as u32;
            let n: u64 = coeff.try_into().expect("small coefficient");
            for _ in 0..n {
                let Some((next, span)) = self.block(k, &at, cur)? else {
                    return Ok(None);
                };
                match &mut total {
                    Some(s) => s.join(&span),
                    None => total = Some(span),
                }
                at = at.add(&Ordinal::omega_pow_n(u64::from(k)));
                cur = next;
            }
        }
        Ok(Some((cur, total.expect("nonempty span"))))
    }
}

/// Ordinals below `w^w` as coefficient vectors indexed by exponent.
pub type Cnf = Vec<u64>;

pub const CNF_LEN: usize = 24;

pub fn cnf_trim(a: &Cnf) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn cnf_cmp(a: &Cnf, b: &Cnf) -> std::cmp::Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

pub fn cnf_add(a: &Cnf, b: &Cnf) -> Cnf {
    let Some(k) = cnf_trim(b) else {
        return a.clone();
    };
    let mut r = b.clone();
    r[k] += a[k];
    r[k + 1..].copy_from_slice(&a[k + 1..]);
    r
}

pub fn cnf_mul(a: &Cnf, b: &Cnf) -> Cnf {
    let zero = vec![0; CNF_LEN];
    let Some(d) = cnf_trim(a) else {
        return zero;
    };
    let mut r = zero.clone();
    for e in (0..CNF_LEN).rev() {
        let c = b[e];
        if c == 0 {
            continue;
        }
        let term = if e > 0 {
            let mut t = zero.clone();
            t[d + e] = c;
            t
        } else {
            let mut t = a.clone();
            t[d] = a[d] * c;
            t
        };
        r = cnf_add(&r, &term);
    }
    r
}

pub fn to_ordinal(a: &Cnf) -> Ordinal {
    Ordinal::from_terms(
        a.iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(e, &c)| (Ordinal::from_u64(e as u64), BigUint::from(c))),
    )
}

pub fn from_ordinal(o: &Ordinal) -> Cnf {
    let mut v = vec![0; CNF_LEN];
    for (e, c) in o.terms() {
        let e = e.to_u64().expect("finite exponent") as usize;
        v[e] = c.try_into().expect("small coefficient");
    }
    v
}

/// Random vector with `terms` nonzero entries among the first `exps`
/// exponents and coefficients in `1..=max_coeff`.
pub fn random_cnf(rng: &mut impl Rng, exps: usize, max_coeff: u64) -> Cnf {
    let mut v = vec![0; CNF_LEN];
    for c in v.iter_mut().take(exps) {
        if rng.gen_bool(0.5) {
            *c = rng.gen_range(1..=max_coeff);
        }
    }
    v
}

/// Well-foundedness of a finite relation by repeatedly removing elements
/// with no predecessor among the remaining ones.
pub fn wellfounded(support: &BTreeSet<usize>, pairs: &BTreeSet<(usize, usize)>) -> bool {
    let mut left: BTreeSet<usize> = support.clone();
    loop {
        let minimal: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&a| !pairs.iter().any(|&(b, c)| c == a && left.contains(&b)))
            .collect();
        if minimal.is_empty() {
            return left.is_empty();
        }
        for a in minimal {
            left.remove(&a);
        }
    }
}
