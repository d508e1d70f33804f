use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::Ratio;

use super::{RingError, ScalarExpr};
use crate::grading::Grade;

/// Frequency `k` of a transcendental generator such as `exp(k phi)`.
pub type Freq = Ratio<i32>;

fn intern(name: &str) -> &'static str {
    static NAMES: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();
    let mut set = NAMES
        .get_or_init(|| Mutex::new(HashSet::new()))
        .lock()
        .expect("name interner poisoned");
    if let Some(s) = set.get(name) {
        return s;
    }
    let leaked: &'static str = Box::leak(name.to_string().into_boxed_str());
    set.insert(leaked);
    leaked
}

/// A named dynamical field (or unknown coefficient function) with a fixed grade.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Field {
    name: &'static str,
    grade: Grade,
}

impl Field {
    pub const fn fixed(name: &'static str, grade: Grade) -> Self {
        Field { name, grade }
    }

    pub fn new(name: &str, grade: Grade) -> Self {
        Field {
            name: intern(name),
            grade,
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn grade(&self) -> Grade {
        self.grade
    }
}

impl Ord for Field {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name
            .cmp(other.name)
            .then_with(|| self.grade.cmp(&other.grade))
    }
}

impl PartialOrd for Field {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

/// A formal x-antiderivative: a generator `W` with `dW/dx = defining`.
#[derive(Debug)]
pub struct Antiderivative {
    pub name: String,
    pub grade: Grade,
    pub defining: ScalarExpr,
}

impl PartialEq for Antiderivative {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.grade == other.grade
    }
}

impl Eq for Antiderivative {}

/// Derivation direction. `Plus` is `d/dx+` (identified with `d/dx` in the
/// positive hierarchy), `Minus` is `d/dx-` (identified with `d/dt`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Dir {
    Plus,
    Minus,
}

impl Dir {
    pub const X: Dir = Dir::Plus;
    pub const T: Dir = Dir::Minus;
}

/// A generator of the graded differential ring.
#[derive(Clone, Debug)]
pub enum Generator {
    /// `d+^dx d-^dt field`.
    Jet { field: Field, dx: u16, dt: u16 },
    /// A `[00]` function of `x-` only: annihilated by `d+`.
    Chiral { field: Field, dt: u16 },
    /// `exp(k field)` for a `[00]` field.
    Exp { field: Field, k: Freq },
    /// `cosh(k field)` for a `[11]` field, `k > 0`.
    Cosh { field: Field, k: Freq },
    /// `sinh(k field)` for a `[11]` field, `k > 0`.
    Sinh { field: Field, k: Freq },
    /// `d-^dt W` for a registered antiderivative `W`.
    Anti { def: Arc<Antiderivative>, dt: u16 },
}

impl Generator {
    pub fn jet(field: Field, dx: u16, dt: u16) -> Self {
        Generator::Jet { field, dx, dt }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Generator::Jet { .. } => 0,
            Generator::Chiral { .. } => 1,
            Generator::Exp { .. } => 2,
            Generator::Cosh { .. } => 3,
            Generator::Sinh { .. } => 4,
            Generator::Anti { .. } => 5,
        }
    }

    /// Name of the field the generator is built on (antiderivative name for `Anti`).
    pub fn field_name(&self) -> &str {
        match self {
            Generator::Jet { field, .. }
            | Generator::Chiral { field, .. }
            | Generator::Exp { field, .. }
            | Generator::Cosh { field, .. }
            | Generator::Sinh { field, .. } => field.name(),
            Generator::Anti { def, .. } => &def.name,
        }
    }

    pub fn field(&self) -> Option<Field> {
        match self {
            Generator::Jet { field, .. }
            | Generator::Chiral { field, .. }
            | Generator::Exp { field, .. }
            | Generator::Cosh { field, .. }
            | Generator::Sinh { field, .. } => Some(*field),
            Generator::Anti { .. } => None,
        }
    }

    fn multi_index(&self) -> (u16, u16) {
        match self {
            Generator::Jet { dx, dt, .. } => (*dx, *dt),
            Generator::Chiral { dt, .. } | Generator::Anti { dt, .. } => (0, *dt),
            _ => (0, 0),
        }
    }

    fn param(&self) -> Freq {
        match self {
            Generator::Exp { k, .. } | Generator::Cosh { k, .. } | Generator::Sinh { k, .. } => *k,
            _ => Freq::from_integer(0),
        }
    }

    pub fn grade(&self) -> Grade {
        match self {
            Generator::Jet { field, .. } | Generator::Chiral { field, .. } => field.grade(),
            Generator::Exp { .. } | Generator::Cosh { .. } => Grade::G00,
            Generator::Sinh { field, .. } => field.grade(),
            Generator::Anti { def, .. } => def.grade,
        }
    }

    pub fn is_transcendental(&self) -> bool {
        matches!(
            self,
            Generator::Exp { .. } | Generator::Cosh { .. } | Generator::Sinh { .. }
        )
    }

    /// Number of x-derivatives carried by a jet; `None` for other kinds.
    pub fn x_order(&self) -> Option<u16> {
        match self {
            Generator::Jet { dx, .. } => Some(*dx),
            _ => None,
        }
    }

    /// Derivative of the single generator.
    pub fn derive(&self, dir: Dir) -> ScalarExpr {
        match self {
            Generator::Jet { field, dx, dt } => match dir {
                Dir::Plus => ScalarExpr::jet(*field, dx + 1, *dt),
                Dir::Minus => ScalarExpr::jet(*field, *dx, dt + 1),
            },
            Generator::Chiral { field, dt } => match dir {
                Dir::Plus => ScalarExpr::zero(),
                Dir::Minus => ScalarExpr::from_generator(Generator::Chiral {
                    field: *field,
                    dt: dt + 1,
                }),
            },
            Generator::Exp { field, k } => {
                let d = ScalarExpr::jet_dir(*field, dir);
                (&d * &ScalarExpr::from_generator(self.clone())).scale(freq_coeff(*k))
            }
            Generator::Cosh { field, k } => {
                let d = ScalarExpr::jet_dir(*field, dir);
                (&d * &ScalarExpr::from_generator(Generator::Sinh { field: *field, k: *k }))
                    .scale(freq_coeff(*k))
            }
            Generator::Sinh { field, k } => {
                let d = ScalarExpr::jet_dir(*field, dir);
                (&d * &ScalarExpr::from_generator(Generator::Cosh { field: *field, k: *k }))
                    .scale(freq_coeff(*k))
            }
            Generator::Anti { def, dt } => match dir {
                Dir::Plus => {
                    let mut e = def.defining.clone();
                    for _ in 0..*dt {
                        e = e.derive(Dir::Minus);
                    }
                    e
                }
                Dir::Minus => ScalarExpr::from_generator(Generator::Anti {
                    def: def.clone(),
                    dt: dt + 1,
                }),
            },
        }
    }
}

pub(crate) fn freq_coeff(k: Freq) -> crate::coeff::Coeff {
    crate::coeff::Coeff::real(crate::coeff::rat(*k.numer() as i128, *k.denom() as i128))
}

impl Ord for Generator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.field_name()
            .cmp(other.field_name())
            .then_with(|| self.kind_rank().cmp(&other.kind_rank()))
            .then_with(|| self.multi_index().cmp(&other.multi_index()))
            .then_with(|| self.param().cmp(&other.param()))
            .then_with(|| self.grade().cmp(&other.grade()))
    }
}

impl PartialOrd for Generator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Generator {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Generator {}

impl Hash for Generator {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field_name().hash(state);
        self.kind_rank().hash(state);
        self.multi_index().hash(state);
        self.param().hash(state);
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let primes = |f: &mut fmt::Formatter<'_>, base: &str, dx: u16, dt: u16| {
            let mut s = String::new();
            match dt {
                0 => {}
                1 => s.push_str("d_t "),
                n => s.push_str(&format!("d_t^{n} ")),
            }
            s.push_str(base);
            if dx <= 3 {
                s.push_str(&"'".repeat(dx as usize));
            } else {
                s.push_str(&format!("^({dx})"));
            }
            f.write_str(&s)
        };
        match self {
            Generator::Jet { field, dx, dt } => primes(f, field.name(), *dx, *dt),
            Generator::Chiral { field, dt } => primes(f, &format!("{}(x-)", field.name()), 0, *dt),
            Generator::Exp { field, k } => write!(f, "exp({} {})", k, field.name()),
            Generator::Cosh { field, k } => write!(f, "cosh({} {})", k, field.name()),
            Generator::Sinh { field, k } => write!(f, "sinh({} {})", k, field.name()),
            Generator::Anti { def, dt } => primes(f, &def.name, 0, *dt),
        }
    }
}

/// Append-only registry of formal antiderivatives; names are unique.
#[derive(Default, Debug)]
pub struct AntiderivativeRegistry {
    defs: Mutex<BTreeMap<String, Arc<Antiderivative>>>,
}

impl AntiderivativeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `W` with `dW/dx = defining` and returns the generator `W`.
    pub fn new_antiderivative(
        &self,
        name: &str,
        grade: Grade,
        defining: ScalarExpr,
    ) -> Result<Generator, RingError> {
        if !defining.is_zero() && defining.homogeneous_grade() != Some(grade) {
            return Err(RingError::GradeMismatch {
                name: name.to_string(),
                declared: grade,
            });
        }
        let mut defs = self.defs.lock().expect("registry poisoned");
        if defs.contains_key(name) {
            return Err(RingError::DuplicateName(name.to_string()));
        }
        let def = Arc::new(Antiderivative {
            name: name.to_string(),
            grade,
            defining,
        });
        defs.insert(name.to_string(), def.clone());
        Ok(Generator::Anti { def, dt: 0 })
    }

    pub fn get(&self, name: &str) -> Option<Arc<Antiderivative>> {
        self.defs.lock().expect("registry poisoned").get(name).cloned()
    }

    pub fn names(&self) -> Vec<String> {
        self.defs
            .lock()
            .expect("registry poisoned")
            .keys()
            .cloned()
            .collect()
    }
}
