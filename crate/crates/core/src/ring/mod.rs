//! Rings of the tower A -> B -> A' and the morphisms between them.

mod frac;
mod morphism;
mod presentation;
mod target;

pub use frac::{substitute as substitute_frac, Frac};
pub use morphism::{AlgebraMorphism, Codomain, MorphismCertificate, RelationCheck};
pub use presentation::{BaseKind, BaseRing, FinitePresentation, LocalCertificate, Settings};
pub use target::{TargetKind, TargetRing};

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::arith::{rational, Polynomial, TruncationOrder};
    use crate::error::Error;
    use crate::serde_poly::parse_free;

    fn p(s: &str) -> Polynomial {
        parse_free(s).unwrap()
    }

    /// Binomial series of sqrt(1+t), coefficient by coefficient.
    fn sqrt_one_plus_t(n: u32) -> Polynomial {
        let mut c = rational(1, 1);
        let mut out = Polynomial::zero();
        for k in 0..n {
            out = out + Polynomial::constant(c.clone()) * Polynomial::var("t").pow(k);
            c = c * (rational(1, 2) - rational(k as i64, 1)) / rational(k as i64 + 1, 1);
        }
        out
    }

    fn local_base() -> BaseRing {
        BaseRing::localized(["t"], vec![p("t")])
    }

    fn run1_b() -> FinitePresentation {
        FinitePresentation::new(local_base(), vec!["Y".into()], vec![p("Y^2 - t^2*(1+t)")]).unwrap()
    }

    fn target() -> TargetRing {
        TargetRing::truncated(["t"], TruncationOrder::new(12).unwrap())
    }

    #[test]
    fn square_root_image_is_well_defined() {
        let y = (p("t") * sqrt_one_plus_t(11)).truncate(12, &["t".to_string()].into());
        let v = AlgebraMorphism::to_target(run1_b(), target(), BTreeMap::from([("Y".to_string(), y)])).unwrap();
        let cert = v.validate().unwrap();
        assert_eq!(cert.precision, Some(12));
        assert!(cert.checks.iter().all(|c| c.image.is_zero()));
    }

    #[test]
    fn wrong_image_reports_residual() {
        let v = AlgebraMorphism::to_target(run1_b(), target(), BTreeMap::from([("Y".to_string(), p("t"))])).unwrap();
        match v.validate() {
            Err(Error::NotWellDefined { residual, .. }) => assert_eq!(residual, "-t^3"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identity_and_composition() {
        let a = FinitePresentation::of_base(local_base());
        assert!(AlgebraMorphism::identity(&a).validate().is_ok());
        let b = run1_b();
        let id = AlgebraMorphism::identity(&b);
        let y = (p("t") * sqrt_one_plus_t(11)).truncate(12, &["t".to_string()].into());
        let v = AlgebraMorphism::to_target(b, target(), BTreeMap::from([("Y".to_string(), y)])).unwrap();
        let c = id.compose(&v).unwrap();
        assert_eq!(c.images, v.images);
    }

    #[test]
    fn localization_and_reduction() {
        let ay = FinitePresentation::new(local_base(), vec!["Y".into()], vec![]).unwrap();
        let l = ay.localize(&Frac::one(), "S").unwrap();
        assert_eq!(l.relations, vec![p("S - 1")]);
        let l2 = l.localize(&Frac::from(p("Y")), "S2").unwrap();
        assert_eq!(l2.vars, vec!["Y", "S", "S2"]);

        let a = FinitePresentation::of_base(BaseRing::polynomial(["t"]));
        let res = a.reduce_mod_power(&p("t"), 1).unwrap();
        assert_eq!(res.canonical_relations().unwrap(), vec![p("t")]);
        assert!(!res.is_zero_ring().unwrap());
        assert!(a.reduce_mod_power(&p("3"), 2).unwrap().is_zero_ring().unwrap());
        let bbar = run1_b().reduce_mod_power(&p("2*t^2"), 3).unwrap();
        assert!(bbar.relations.contains(&p("8*t^6")));
    }

    #[test]
    fn local_membership_uses_unit_multipliers() {
        let b = FinitePresentation::new(local_base(), vec!["Y".into()], vec![p("(1+t)*Y")]).unwrap();
        let cert = b.certify_member(&p("Y")).unwrap().unwrap();
        assert!(cert.verify(&p("Y"), &b.all_relations()));
        assert!(!cert.multiplier.is_one());
        let global = FinitePresentation::new(BaseRing::polynomial(["t"]), vec!["Y".into()], vec![p("(1+t)*Y")]).unwrap();
        assert!(global.certify_member(&p("Y")).unwrap().is_none());
        let tb = FinitePresentation::new(local_base(), vec!["Y".into()], vec![p("t*Y")]).unwrap();
        assert!(tb.certify_member(&p("Y")).unwrap().is_none());
    }

    #[test]
    fn localization_extends_iff_image_is_unit() {
        let ay = FinitePresentation::new(local_base(), vec!["Y".into()], vec![]).unwrap();
        let loc = ay.localize(&Frac::from(p("Y")), "S").unwrap();
        let v = AlgebraMorphism::to_target(ay.clone(), target(), BTreeMap::from([("Y".to_string(), p("1 + t"))])).unwrap();
        let ext = v.extend_to_localization(&loc, &Frac::from(p("Y")), "S").unwrap();
        assert!(ext.validate().is_ok());
        let bad = AlgebraMorphism::to_target(ay, target(), BTreeMap::from([("Y".to_string(), p("t"))])).unwrap();
        assert!(matches!(bad.extend_to_localization(&loc, &Frac::from(p("Y")), "S"), Err(Error::NotUnit(_))));
    }

    #[test]
    fn base_units_and_division() {
        let a = local_base();
        assert!(a.is_unit(&p("1 + t")).unwrap());
        assert!(!a.is_unit(&p("t + t^2")).unwrap());
        let q = a.divide(&Frac::from(p("t^3")), &Frac::from(p("2*t^2 + 2*t^3"))).unwrap();
        assert_eq!(q, Frac::new(p("t"), p("2 + 2*t")).unwrap());
        let art = BaseRing::quotient(["t"], vec![p("t^5")]);
        assert_eq!(art.annihilator_exponent(&p("t^2"), 1).unwrap().0, 3);
        assert_eq!(a.annihilator_exponent(&p("2*t^2"), 1).unwrap().0, 1);
        assert_eq!(BaseRing::polynomial(["t"]).annihilator_exponent(&p("t^2"), 0).unwrap().0, 0);
    }
}
