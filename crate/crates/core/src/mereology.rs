//! Finite set model of mereology.
//!
//! Entities are nonempty subsets of a finite carrier of atoms (at most 64).
//! The algebra has no zero: operations whose set result would be empty
//! return [`MaybeEntity::Empty`], which lies outside the domain and has
//! weight 0.

use std::fmt;

use thiserror::Error;

pub const MAX_ATOMS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MereologyError {
    #[error("carrier must have between 1 and {MAX_ATOMS} atoms, got {0}")]
    CarrierSize(usize),
    #[error("duplicate atom label `{0}`")]
    DuplicateAtom(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("entities come from carriers of different sizes ({0} vs {1})")]
    CarrierMismatch(usize, usize),
    #[error("an entity must contain at least one atom")]
    EmptyEntity,
    #[error("class of an empty family is undefined")]
    ClassOfEmptyFamily,
    #[error("relative complement requires part(x, y)")]
    NotAPart,
    #[error("weights need one positive finite mass per atom")]
    InvalidMass,
}

pub type Result<T, E = MereologyError> = std::result::Result<T, E>;

/// Labelled atoms interpreting the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carrier {
    atoms: Vec<String>,
}

impl Carrier {
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        if labels.is_empty() || labels.len() > MAX_ATOMS {
            return Err(MereologyError::CarrierSize(labels.len()));
        }
        let atoms: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].contains(a) {
                return Err(MereologyError::DuplicateAtom(a.clone()));
            }
        }
        Ok(Carrier { atoms })
    }

    /// Carrier with atoms `a0, a1, …`.
    pub fn with_size(n: usize) -> Result<Self> {
        let labels: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
        Self::new(&labels)
    }

    pub fn size(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    fn full_mask(&self) -> u64 {
        full_mask(self.atoms.len())
    }

    /// The universal entity `V`.
    pub fn universe(&self) -> Entity {
        Entity {
            mask: self.full_mask(),
            width: self.atoms.len() as u8,
        }
    }

    pub fn entity<S: AsRef<str>>(&self, labels: &[S]) -> Result<Entity> {
        let mut mask = 0u64;
        for l in labels {
            let i = self
                .atoms
                .iter()
                .position(|a| a == l.as_ref())
                .ok_or_else(|| MereologyError::UnknownAtom(l.as_ref().to_string()))?;
            mask |= 1 << i;
        }
        self.from_mask(mask)
    }

    pub fn from_mask(&self, mask: u64) -> Result<Entity> {
        let mask = mask & self.full_mask();
        if mask == 0 {
            return Err(MereologyError::EmptyEntity);
        }
        Ok(Entity {
            mask,
            width: self.atoms.len() as u8,
        })
    }

    /// Every entity of the domain, i.e. all `2^n - 1` nonempty subsets.
    pub fn entities(&self) -> impl Iterator<Item = Entity> + '_ {
        let width = self.atoms.len() as u8;
        (1..=self.full_mask()).map(move |mask| Entity { mask, width })
    }

    pub fn label(&self, x: &Entity) -> String {
        let names: Vec<&str> = (0..self.size())
            .filter(|&i| x.mask & (1 << i) != 0)
            .map(|i| self.atoms[i].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A nonempty set of atoms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entity {
    mask: u64,
    width: u8,
}

impl fmt::Debug for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Entity({:0w$b})", self.mask, w = self.width as usize)
    }
}

/// An entity or the empty entity `∅ ∉ Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaybeEntity {
    Empty,
    Entity(Entity),
}

impl MaybeEntity {
    fn from_mask(mask: u64, width: u8) -> Self {
        if mask == 0 {
            MaybeEntity::Empty
        } else {
            MaybeEntity::Entity(Entity { mask, width })
        }
    }

    pub fn entity(self) -> Option<Entity> {
        match self {
            MaybeEntity::Entity(e) => Some(e),
            MaybeEntity::Empty => None,
        }
    }

    pub fn is_empty(self) -> bool {
        matches!(self, MaybeEntity::Empty)
    }

    fn mask(self) -> u64 {
        match self {
            MaybeEntity::Entity(e) => e.mask,
            MaybeEntity::Empty => 0,
        }
    }
}

impl From<Entity> for MaybeEntity {
    fn from(e: Entity) -> Self {
        MaybeEntity::Entity(e)
    }
}

impl Entity {
    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn atom_count(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn is_universe(&self) -> bool {
        self.mask == full_mask(self.width as usize)
    }

    fn same_carrier(&self, other: &Entity) -> Result<()> {
        if self.width == other.width {
            Ok(())
        } else {
            Err(MereologyError::CarrierMismatch(
                self.width as usize,
                other.width as usize,
            ))
        }
    }

    /// Proper part: `self ⊂ other` strictly.
    pub fn part(&self, other: &Entity) -> Result<bool> {
        self.same_carrier(other)?;
        Ok(self.mask != other.mask && self.mask & !other.mask == 0)
    }

    /// Part or equal.
    pub fn subst(&self, other: &Entity) -> Result<bool> {
        self.same_carrier(other)?;
        Ok(self.mask & !other.mask == 0)
    }

    pub fn overlap(&self, other: &Entity) -> Result<bool> {
        self.same_carrier(other)?;
        Ok(self.mask & other.mask != 0)
    }

    /// Exteriority, the negation of overlap.
    pub fn ext(&self, other: &Entity) -> Result<bool> {
        Ok(!self.overlap(other)?)
    }

    /// `-x`: the class of everything exterior to `x`; empty for `V`.
    pub fn complement(&self) -> MaybeEntity {
        MaybeEntity::from_mask(!self.mask & full_mask(self.width as usize), self.width)
    }

    /// Class of `{t : part(t, y) ∧ ext(t, x)}`, defined when `part(x, y)`.
    pub fn rel_complement(&self, y: &Entity) -> Result<MaybeEntity> {
        if !self.part(y)? {
            return Err(MereologyError::NotAPart);
        }
        Ok(MaybeEntity::from_mask(y.mask & !self.mask, self.width))
    }

    pub fn sum(&self, other: &Entity) -> Result<Entity> {
        self.same_carrier(other)?;
        Ok(Entity {
            mask: self.mask | other.mask,
            width: self.width,
        })
    }

    pub fn product(&self, other: &Entity) -> Result<MaybeEntity> {
        self.same_carrier(other)?;
        Ok(MaybeEntity::from_mask(self.mask & other.mask, self.width))
    }

    /// `x → y ≡ -x + y`.
    pub fn implication(&self, y: &Entity) -> Result<MaybeEntity> {
        self.same_carrier(y)?;
        Ok(MaybeEntity::from_mask(
            (!self.mask & full_mask(self.width as usize)) | y.mask,
            self.width,
        ))
    }

    /// `x → y` is valid when it equals `V`.
    pub fn is_valid_implication(&self, y: &Entity) -> Result<bool> {
        Ok(match self.implication(y)? {
            MaybeEntity::Entity(e) => e.is_universe(),
            MaybeEntity::Empty => false,
        })
    }
}

/// Sum/product/complement lifted to [`MaybeEntity`], with `∅` as the
/// neutral element of sum and absorbing element of product.
pub mod lifted {
    use super::*;

    pub fn sum(x: MaybeEntity, y: MaybeEntity) -> MaybeEntity {
        match (x, y) {
            (MaybeEntity::Empty, o) | (o, MaybeEntity::Empty) => o,
            (MaybeEntity::Entity(a), MaybeEntity::Entity(b)) => MaybeEntity::from_mask(a.mask | b.mask, a.width),
        }
    }

    pub fn product(x: MaybeEntity, y: MaybeEntity) -> MaybeEntity {
        match (x, y) {
            (MaybeEntity::Entity(a), MaybeEntity::Entity(b)) => MaybeEntity::from_mask(a.mask & b.mask, a.width),
            _ => MaybeEntity::Empty,
        }
    }

    /// Complement of `∅` is not needed by any identity and is left as `∅`.
    pub fn complement(x: MaybeEntity) -> MaybeEntity {
        match x {
            MaybeEntity::Entity(e) => e.complement(),
            MaybeEntity::Empty => MaybeEntity::Empty,
        }
    }
}

/// Class operator: the union of a nonempty family.
pub fn cls(family: &[Entity]) -> Result<Entity> {
    let first = family.first().ok_or(MereologyError::ClassOfEmptyFamily)?;
    let mut mask = 0;
    for e in family {
        first.same_carrier(e)?;
        mask |= e.mask;
    }
    Ok(Entity {
        mask,
        width: first.width,
    })
}

/// Normalized positive measure over the atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFn {
    masses: Vec<f64>,
    total: f64,
}

impl WeightFn {
    pub fn uniform(carrier: &Carrier) -> Self {
        WeightFn {
            masses: vec![1.0; carrier.size()],
            total: carrier.size() as f64,
        }
    }

    pub fn new(carrier: &Carrier, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != carrier.size() || masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(MereologyError::InvalidMass);
        }
        let total = masses.iter().sum();
        Ok(WeightFn { masses, total })
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `w(x)`: share of the total mass held by `x`'s atoms; `w(∅) = 0`.
    pub fn weight(&self, x: impl Into<MaybeEntity>) -> f64 {
        let mask = x.into().mask();
        let mass: f64 = self
            .masses
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, m)| m)
            .sum();
        mass / self.total
    }
}
