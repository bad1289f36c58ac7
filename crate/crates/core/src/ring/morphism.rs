use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Frac, FinitePresentation, LocalCertificate, TargetRing};
use crate::arith::Polynomial;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "ring", rename_all = "lowercase")]
pub enum Codomain {
    Target(TargetRing),
    Presentation(FinitePresentation),
}

/// An A-algebra map out of a finite presentation, given by the images of its
/// variables. Base variables go to their structure images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraMorphism {
    pub source: FinitePresentation,
    pub codomain: Codomain,
    #[serde(with = "crate::serde_poly::map")]
    pub images: BTreeMap<String, Polynomial>,
    /// Precision at which relations must vanish in a truncated target
    /// (defaults to the truncation order).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    #[serde(with = "crate::serde_poly")]
    pub relation: Polynomial,
    /// Image of the relation, reduced in the codomain (zero when it vanishes).
    #[serde(with = "crate::serde_poly")]
    pub image: Polynomial,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<LocalCertificate>,
}

/// One check per source relation; all images vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismCertificate {
    pub precision: Option<u32>,
    pub checks: Vec<RelationCheck>,
}

impl AlgebraMorphism {
    pub fn to_target(source: FinitePresentation, target: TargetRing, images: BTreeMap<String, Polynomial>) -> Result<Self> {
        let m = Self { source, codomain: Codomain::Target(target), images, precision: None };
        m.check_images()?;
        Ok(m)
    }

    pub fn to_presentation(
        source: FinitePresentation,
        target: FinitePresentation,
        images: BTreeMap<String, Polynomial>,
    ) -> Result<Self> {
        if source.base != target.base {
            return Err(Error::ContextMismatch("source and target presentations have different bases".into()));
        }
        let m = Self { source, codomain: Codomain::Presentation(target), images, precision: None };
        m.check_images()?;
        Ok(m)
    }

    pub fn identity(p: &FinitePresentation) -> Self {
        let images = p.vars.iter().map(|v| (v.clone(), Polynomial::var(v))).collect();
        Self { source: p.clone(), codomain: Codomain::Presentation(p.clone()), images, precision: None }
    }

    pub fn with_precision(mut self, prec: u32) -> Self {
        self.precision = Some(prec);
        self
    }

    fn check_images(&self) -> Result<()> {
        for v in &self.source.vars {
            if !self.images.contains_key(v) {
                return Err(Error::Invalid(format!("no image for `{v}`")));
            }
        }
        for (v, img) in &self.images {
            if !self.source.vars.contains(v) {
                return Err(Error::UndeclaredVariable(v.clone()));
            }
            match &self.codomain {
                Codomain::Target(t) => t.check(img)?,
                Codomain::Presentation(p) => p.context().check(img)?,
            }
        }
        Ok(())
    }

    pub fn target(&self) -> Option<&TargetRing> {
        match &self.codomain {
            Codomain::Target(t) => Some(t),
            Codomain::Presentation(_) => None,
        }
    }

    pub fn target_presentation(&self) -> Option<&FinitePresentation> {
        match &self.codomain {
            Codomain::Presentation(p) => Some(p),
            Codomain::Target(_) => None,
        }
    }

    pub fn image(&self, var: &str) -> Option<&Polynomial> {
        self.images.get(var)
    }

    pub fn effective_precision(&self) -> Option<u32> {
        match &self.codomain {
            Codomain::Target(t) => self.precision.or(t.precision()),
            Codomain::Presentation(_) => None,
        }
    }

    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        match &self.codomain {
            Codomain::Target(t) => t.evaluate(f, &self.images),
            Codomain::Presentation(_) => f.substitute(&self.images),
        }
    }

    /// Image of an element with a tracked base denominator. Into a target the
    /// denominator is inverted; into a presentation it is carried along.
    pub fn apply_frac(&self, f: &Frac) -> Result<Frac> {
        match &self.codomain {
            Codomain::Target(t) => Ok(Frac::from(t.evaluate_frac(f, &self.images)?)),
            Codomain::Presentation(_) => Frac::new(self.apply(f.num()), f.den().clone()),
        }
    }

    /// Checks that every relation of the source (base relations included)
    /// maps to zero.
    pub fn validate(&self) -> Result<MorphismCertificate> {
        let prec = self.effective_precision();
        let mut checks = Vec::new();
        for rel in self.source.all_relations() {
            let image = self.apply(&rel);
            let (residual, certificate) = match &self.codomain {
                Codomain::Target(t) => (t.reduce_at(&image, prec), None),
                Codomain::Presentation(p) => match direct_member(p, &image).map_or_else(|| p.certify_member(&image), |c| Ok(Some(c)))? {
                    Some(c) => (Polynomial::zero(), Some(c)),
                    None => (p.ideal().normal_form(&image)?.0, None),
                },
            };
            if !residual.is_zero() {
                return Err(Error::NotWellDefined { relation: rel.to_string(), residual: residual.to_string() });
            }
            checks.push(RelationCheck { relation: rel, image: residual, certificate });
        }
        Ok(MorphismCertificate { precision: prec, checks })
    }

    /// `g ∘ self`: images of `self` pushed through `g`, then revalidated.
    pub fn compose(&self, g: &AlgebraMorphism) -> Result<AlgebraMorphism> {
        let mid = self
            .target_presentation()
            .ok_or_else(|| Error::ContextMismatch("first map lands in a target ring".into()))?;
        if mid != &g.source {
            return Err(Error::ContextMismatch("target of the first map is not the source of the second".into()));
        }
        let images = self.images.iter().map(|(v, img)| (v.clone(), g.apply(img))).collect();
        let out = AlgebraMorphism {
            source: self.source.clone(),
            codomain: g.codomain.clone(),
            images,
            precision: g.precision,
        };
        out.validate()?;
        Ok(out)
    }

    /// Extends `self` along `B -> B[S]/(s S - 1)` by sending `S` to the inverse
    /// of the image of `s`.
    pub fn extend_to_localization(&self, loc: &FinitePresentation, s: &Frac, var: &str) -> Result<AlgebraMorphism> {
        let img = self.apply_frac(s)?;
        let inv = match &self.codomain {
            Codomain::Target(t) => t.inverse(img.num())?,
            Codomain::Presentation(p) => {
                if !img.is_polynomial() {
                    return Err(Error::NotUnit(format!("image `{img}` carries a denominator")));
                }
                p.ideal().unit_inverse(img.num())?
            }
        };
        let mut images = self.images.clone();
        images.insert(var.to_string(), inv);
        let out = AlgebraMorphism { source: loc.clone(), codomain: self.codomain.clone(), images, precision: self.precision };
        out.check_images()?;
        Ok(out)
    }

    /// Whether two maps with the same source agree on every variable
    /// (compared at the coarser precision).
    pub fn agrees_with(&self, other: &AlgebraMorphism) -> bool {
        let prec = match (self.effective_precision(), other.effective_precision()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.source.vars.iter().all(|v| match (&self.codomain, self.images.get(v), other.images.get(v)) {
            (Codomain::Target(t), Some(a), Some(b)) => t.reduce_at(&(a - b), prec).is_zero(),
            (_, Some(a), Some(b)) => a == b,
            _ => false,
        })
    }
}

/// Certificate for an image that is literally a multiple of one relation,
/// which spares a Groebner basis of the codomain.
fn direct_member(p: &FinitePresentation, f: &Polynomial) -> Option<LocalCertificate> {
    let gens = p.all_relations();
    if f.is_zero() {
        return Some(LocalCertificate { multiplier: Polynomial::one(), cofactors: vec![Polynomial::zero(); gens.len()] });
    }
    let (m, c) = f.leading_term()?;
    for (i, g) in gens.iter().enumerate() {
        match g.leading_term() {
            Some((gm, gc)) if gm == m => {
                let ratio = c.clone() / gc.clone();
                if &g.scale(&ratio) == f {
                    let mut cofactors = vec![Polynomial::zero(); gens.len()];
                    cofactors[i] = Polynomial::constant(ratio);
                    return Some(LocalCertificate { multiplier: Polynomial::one(), cofactors });
                }
            }
            _ => {}
        }
    }
    None
}
