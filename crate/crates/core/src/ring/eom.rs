use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use super::{Dir, Field, Generator, Monomial, RingError, ScalarExpr};
use crate::coeff::Coeff;

/// Nesting depth after which normalization is declared non-terminating.
const DEPTH_LIMIT: usize = 256;

/// `d+^a d-^b field -> rhs` for all `a >= min_dx`, `b >= min_dt`
/// (the right-hand side is differentiated accordingly).
#[derive(Clone, Debug)]
pub struct EomRule {
    pub field: Field,
    pub min_dx: u16,
    pub min_dt: u16,
    pub rhs: ScalarExpr,
}

/// Oriented rewrite rules; at most one rule per field, so patterns never overlap.
#[derive(Debug, Default)]
pub struct EomSystem {
    rules: BTreeMap<Field, EomRule>,
    cache: Mutex<HashMap<(Field, u16, u16), ScalarExpr>>,
}

impl Clone for EomSystem {
    fn clone(&self) -> Self {
        EomSystem {
            rules: self.rules.clone(),
            cache: Mutex::default(),
        }
    }
}

impl EomSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_rule(mut self, field: Field, min_dx: u16, min_dt: u16, rhs: ScalarExpr) -> Self {
        self.add_rule(field, min_dx, min_dt, rhs)
            .expect("overlapping rule in builder");
        self
    }

    pub fn add_rule(
        &mut self,
        field: Field,
        min_dx: u16,
        min_dt: u16,
        rhs: ScalarExpr,
    ) -> Result<(), RingError> {
        if self.rules.contains_key(&field) {
            return Err(RingError::OverlappingRule(field.name().to_string()));
        }
        self.rules.insert(
            field,
            EomRule {
                field,
                min_dx,
                min_dt,
                rhs,
            },
        );
        self.cache.lock().expect("eom cache poisoned").clear();
        Ok(())
    }

    /// A plain substitution `field := value`, prolonged to all derivatives.
    pub fn with_substitution(self, field: Field, value: ScalarExpr) -> Self {
        self.with_rule(field, 0, 0, value)
    }

    pub fn rules(&self) -> impl Iterator<Item = &EomRule> {
        self.rules.values()
    }

    pub fn rule(&self, field: Field) -> Option<&EomRule> {
        self.rules.get(&field)
    }

    /// Union of two rule sets; fails if both constrain the same field.
    pub fn merged(&self, other: &EomSystem) -> Result<EomSystem, RingError> {
        let mut out = self.clone();
        for r in other.rules() {
            out.add_rule(r.field, r.min_dx, r.min_dt, r.rhs.clone())?;
        }
        Ok(out)
    }

    pub fn normalize(&self, p: &ScalarExpr) -> Result<ScalarExpr, RingError> {
        self.normalize_at(p, 0)
    }

    fn normalize_at(&self, p: &ScalarExpr, depth: usize) -> Result<ScalarExpr, RingError> {
        if depth > DEPTH_LIMIT {
            return Err(RingError::NonTermination);
        }
        let mut out = ScalarExpr::zero();
        for (m, c) in p.terms() {
            let mut reduced: Vec<Option<ScalarExpr>> = Vec::with_capacity(m.0.len());
            let mut any = false;
            for (g, _) in &m.0 {
                let r = self.reduce_generator(g, depth)?;
                any |= r.is_some();
                reduced.push(r);
            }
            if !any {
                out.add_term(m.clone(), *c);
                continue;
            }
            let mut prod = ScalarExpr::constant(*c);
            for ((g, mult), r) in m.0.iter().zip(reduced) {
                let factor = match r {
                    Some(e) => e.pow(*mult),
                    None => ScalarExpr::from_monomial(Monomial(vec![(g.clone(), *mult)]), Coeff::from(1)),
                };
                prod = &prod * &factor;
                if prod.is_zero() {
                    break;
                }
            }
            out += prod;
        }
        Ok(out)
    }

    fn reduce_generator(&self, g: &Generator, depth: usize) -> Result<Option<ScalarExpr>, RingError> {
        let Generator::Jet { field, dx, dt } = g else {
            return Ok(None);
        };
        let Some(rule) = self.rules.get(field) else {
            return Ok(None);
        };
        if *dx < rule.min_dx || *dt < rule.min_dt {
            return Ok(None);
        }
        self.reduce_jet(rule, *dx, *dt, depth).map(Some)
    }

    fn reduce_jet(&self, rule: &EomRule, dx: u16, dt: u16, depth: usize) -> Result<ScalarExpr, RingError> {
        if depth > DEPTH_LIMIT {
            return Err(RingError::NonTermination);
        }
        let key = (rule.field, dx, dt);
        if let Some(e) = self.cache.lock().expect("eom cache poisoned").get(&key) {
            return Ok(e.clone());
        }
        let result = if dt > rule.min_dt {
            let base = self.reduce_jet(rule, dx, dt - 1, depth + 1)?;
            self.normalize_at(&base.derive(Dir::Minus), depth + 1)?
        } else if dx > rule.min_dx {
            let base = self.reduce_jet(rule, dx - 1, dt, depth + 1)?;
            self.normalize_at(&base.derive(Dir::Plus), depth + 1)?
        } else {
            self.normalize_at(&rule.rhs, depth + 1)?
        };
        self.cache
            .lock()
            .expect("eom cache poisoned")
            .insert(key, result.clone());
        Ok(result)
    }
}

/// Free function form of [`EomSystem::normalize`].
pub fn normalize_with_eom(p: &ScalarExpr, eom: &EomSystem) -> Result<ScalarExpr, RingError> {
    eom.normalize(p)
}
