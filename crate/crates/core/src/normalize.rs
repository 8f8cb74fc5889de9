//! Normal forms up to bisimilarity.
//!
//! `congr(p, r)` holds when no proper reduct `t` of `p` satisfies
//! `t . r ↔ r`. The predicates `nfmult(p, r)` ("p is normal in front of r")
//! and `nf(p)` require `congr` at every star, against the context the star
//! body runs in. Normalization rewrites any term into a bisimilar normal
//! form without increasing its star depth.

use thiserror::Error;

use crate::session::{CapExceeded, Session};
use crate::term::{Term, TermKind};

/// Result of the congruence-restoring steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalizationOutcome {
    /// `s` may stand in front of the context `r`: the original product is
    /// bisimilar to `s . r`, and `nfmult(s, r)`, `congr(s, r)` hold.
    Multiplied(Term),
    /// The context itself collapses: `r ↔ s . 0` with `nf(s . 0)`.
    Collapsed(Term),
}

impl NormalizationOutcome {
    pub fn term(&self) -> &Term {
        match self {
            NormalizationOutcome::Multiplied(s) | NormalizationOutcome::Collapsed(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error(transparent)]
    Cap(#[from] CapExceeded),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("internal error: {0}")]
    Internal(String),
}

type Res<T> = Result<T, NormalizeError>;

impl Session {
    /// `congr(p, r)`: no `t` with `p ->+ t` has `t . r ↔ r`.
    pub fn congr(&self, p: &Term, r: &Term) -> Result<bool, CapExceeded> {
        let key = (p.clone(), r.clone());
        if let Some(&b) = self.congr.borrow().get(&key) {
            return Ok(b);
        }
        let mut result = true;
        for t in self.reachable_plus(p)?.iter() {
            if self.bisimilar_terms(&Term::mult(t.clone(), r.clone()), r)? {
                result = false;
                break;
            }
        }
        self.congr.borrow_mut().insert(key, result);
        Ok(result)
    }

    /// The `nfmult` predicate.
    pub fn is_nfmult(&self, p: &Term, q: &Term) -> Result<bool, CapExceeded> {
        let key = (p.clone(), q.clone());
        if let Some(&b) = self.nfmult.borrow().get(&key) {
            return Ok(b);
        }
        let result = match p.kind() {
            TermKind::Zero | TermKind::Act(_) => true,
            TermKind::Plus(p1, p2) => self.is_nfmult(p1, q)? && self.is_nfmult(p2, q)?,
            TermKind::Mult(p1, p2) => {
                self.is_nfmult(p1, &Term::mult(p2.clone(), q.clone()))? && self.is_nfmult(p2, q)?
            }
            TermKind::Star(p1, p2) => {
                let ctx = Term::mult(p.clone(), q.clone());
                self.is_nfmult(p1, &ctx)? && self.is_nfmult(p2, q)? && self.congr(p1, &ctx)?
            }
        };
        self.nfmult.borrow_mut().insert(key, result);
        Ok(result)
    }

    /// The `nf` predicate.
    pub fn is_nf(&self, p: &Term) -> Result<bool, CapExceeded> {
        if let Some(&b) = self.nf.borrow().get(p) {
            return Ok(b);
        }
        let result = match p.kind() {
            TermKind::Zero | TermKind::Act(_) => true,
            TermKind::Plus(p1, p2) => self.is_nf(p1)? && self.is_nf(p2)?,
            TermKind::Mult(p1, p2) => self.is_nfmult(p1, p2)? && self.is_nf(p2)?,
            TermKind::Star(p1, p2) => {
                self.is_nfmult(p1, p)? && self.is_nf(p2)? && self.congr(p1, p)?
            }
        };
        self.nf.borrow_mut().insert(p.clone(), result);
        Ok(result)
    }

    /// Restores `congr` for `p . q` in front of `r`.
    ///
    /// Requires `nfmult(p . q, r)` and `congr(q, r)`.
    pub fn congr_mult_step(&self, p: &Term, q: &Term, r: &Term) -> Res<NormalizationOutcome> {
        if !self.is_nfmult(&Term::mult(p.clone(), q.clone()), r)? {
            return Err(NormalizeError::Precondition(
                "nfmult(p . q, r) does not hold",
            ));
        }
        if !self.congr(q, r)? {
            return Err(NormalizeError::Precondition("congr(q, r) does not hold"));
        }
        self.mult_step(p, q, r)
    }

    /// Restores `congr` for `p` in front of `r`. Requires `nfmult(p, r)`.
    pub fn congr_ex_step(&self, p: &Term, r: &Term) -> Res<NormalizationOutcome> {
        if !self.is_nfmult(p, r)? {
            return Err(NormalizeError::Precondition("nfmult(p, r) does not hold"));
        }
        self.ex_step(p, r)
    }

    fn mult_step(&self, p: &Term, q: &Term, r: &Term) -> Res<NormalizationOutcome> {
        use NormalizationOutcome::*;
        match p.kind() {
            TermKind::Zero => Ok(Multiplied(p.clone())),
            TermKind::Act(_) => {
                if self.bisimilar_terms(&Term::mult(q.clone(), r.clone()), r)? {
                    Ok(Multiplied(p.clone()))
                } else {
                    Ok(Multiplied(Term::mult(p.clone(), q.clone())))
                }
            }
            TermKind::Plus(p1, p2) => {
                let s1 = match self.mult_step(p1, q, r)? {
                    Multiplied(s) => s,
                    c => return Ok(c),
                };
                let s2 = match self.mult_step(p2, q, r)? {
                    Multiplied(s) => s,
                    c => return Ok(c),
                };
                Ok(Multiplied(Term::plus(s1, s2)))
            }
            TermKind::Mult(p1, p2) => match self.mult_step(p2, q, r)? {
                Multiplied(s2) => self.mult_step(p1, &s2, r),
                c => Ok(c),
            },
            TermKind::Star(p1, p2) => match self.mult_step(p2, q, r)? {
                Multiplied(s2) => self.star_step(p, p1, &s2, r),
                c => Ok(c),
            },
        }
    }

    fn ex_step(&self, p: &Term, r: &Term) -> Res<NormalizationOutcome> {
        use NormalizationOutcome::*;
        match p.kind() {
            TermKind::Zero | TermKind::Act(_) => Ok(Multiplied(p.clone())),
            TermKind::Plus(p1, p2) => {
                let s1 = match self.ex_step(p1, r)? {
                    Multiplied(s) => s,
                    c => return Ok(c),
                };
                let s2 = match self.ex_step(p2, r)? {
                    Multiplied(s) => s,
                    c => return Ok(c),
                };
                Ok(Multiplied(Term::plus(s1, s2)))
            }
            TermKind::Mult(p1, p2) => match self.ex_step(p2, r)? {
                Multiplied(s2) => self.mult_step(p1, &s2, r),
                c => Ok(c),
            },
            TermKind::Star(p1, p2) => match self.ex_step(p2, r)? {
                Multiplied(s2) => self.star_step(p, p1, &s2, r),
                c => Ok(c),
            },
        }
    }

    /// The star case shared by both steps: `p1 * s2` in front of `r`, where
    /// `s2` already satisfies `congr(s2, r)`. `p` is the original star, used
    /// for the depth measure.
    fn star_step(&self, p: &Term, p1: &Term, s2: &Term, r: &Term) -> Res<NormalizationOutcome> {
        use NormalizationOutcome::*;
        let star = Term::star(p1.clone(), s2.clone());
        let ctx = Term::mult(star.clone(), r.clone());
        if self.bisimilar_terms(&ctx, r)? {
            // r ↔ (p1 * s2) * 0 ↔ (p1 + s2) * 0
            return Ok(Collapsed(Term::star(
                Term::plus(p1.clone(), s2.clone()),
                Term::zero(),
            )));
        }
        let mut loop_t = None;
        for t in self.reachable_plus(p1)?.iter() {
            if self.bisimilar_terms(&Term::mult(t.clone(), ctx.clone()), r)? {
                loop_t = Some(t.clone());
                break;
            }
        }
        let Some(t) = loop_t else {
            return Ok(Multiplied(star));
        };
        // r ↔ t . D
        let d = Term::star(
            Term::plus(p1.clone(), Term::mult(s2.clone(), t.clone())),
            Term::zero(),
        );
        for u in self.reachable_plus(s2)?.iter() {
            let ut = Term::mult(u.clone(), t.clone());
            if self.bisimilar_terms(&Term::mult(ut, d.clone()), &d)? {
                // r ↔ (t . u) * 0
                if t.star_depth() >= p.star_depth() {
                    return Err(NormalizeError::Internal(format!(
                        "depth measure not decreasing: {t} under {p}"
                    )));
                }
                let r2 = Term::star(Term::mult(t.clone(), u.clone()), Term::zero());
                return Ok(match self.mult_step(&t, u, &r2)? {
                    Multiplied(s) => Collapsed(Term::star(s, Term::zero())),
                    c => c,
                });
            }
        }
        Ok(Collapsed(Term::mult(t, d)))
    }

    /// A `q` with `p . r ↔ q . r`, `nfmult(q, r)` and `d(q) <= d(p)`.
    pub fn normalize_mult(&self, p: &Term, r: &Term) -> Res<Term> {
        match p.kind() {
            TermKind::Zero | TermKind::Act(_) => Ok(p.clone()),
            TermKind::Plus(p1, p2) => Ok(Term::plus(
                self.normalize_mult(p1, r)?,
                self.normalize_mult(p2, r)?,
            )),
            TermKind::Mult(p1, p2) => {
                let q2 = self.normalize_mult(p2, r)?;
                let q1 = self.normalize_mult(p1, &Term::mult(q2.clone(), r.clone()))?;
                Ok(Term::mult(q1, q2))
            }
            TermKind::Star(p1, p2) => {
                let q2 = self.normalize_mult(p2, r)?;
                let ctx = Term::mult(Term::star(p1.clone(), q2.clone()), r.clone());
                let p1n = self.normalize_mult(p1, &ctx)?;
                let ctx = Term::mult(Term::star(p1n.clone(), q2.clone()), r.clone());
                self.close_star(p, &p1n, q2, &ctx)
            }
        }
    }

    /// A bisimilar `q` with `nf(q)` and `d(q) <= d(p)`.
    pub fn normalize(&self, p: &Term) -> Res<Term> {
        match p.kind() {
            TermKind::Zero | TermKind::Act(_) => Ok(p.clone()),
            TermKind::Plus(p1, p2) => Ok(Term::plus(self.normalize(p1)?, self.normalize(p2)?)),
            TermKind::Mult(p1, p2) => {
                let q2 = self.normalize(p2)?;
                let q1 = self.normalize_mult(p1, &q2)?;
                Ok(Term::mult(q1, q2))
            }
            TermKind::Star(p1, p2) => {
                let q2 = self.normalize(p2)?;
                let p1n = self.normalize_mult(p1, &Term::star(p1.clone(), q2.clone()))?;
                let ctx = Term::star(p1n.clone(), q2.clone());
                self.close_star(p, &p1n, q2, &ctx)
            }
        }
    }

    fn close_star(&self, p: &Term, body: &Term, exit: Term, ctx: &Term) -> Res<Term> {
        let q = match self.ex_step(body, ctx)? {
            NormalizationOutcome::Multiplied(s) => Term::star(s, exit),
            NormalizationOutcome::Collapsed(s) => Term::mult(s, Term::zero()),
        };
        if q.star_depth() > p.star_depth() {
            return Err(NormalizeError::Internal(format!(
                "normal form {q} is deeper than {p}"
            )));
        }
        Ok(q)
    }
}

pub fn congr(p: &Term, r: &Term) -> Result<bool, CapExceeded> {
    Session::new().congr(p, r)
}

pub fn is_nfmult(p: &Term, q: &Term) -> Result<bool, CapExceeded> {
    Session::new().is_nfmult(p, q)
}

pub fn is_nf(p: &Term) -> Result<bool, CapExceeded> {
    Session::new().is_nf(p)
}

pub fn congr_mult_step(p: &Term, q: &Term, r: &Term) -> Res<NormalizationOutcome> {
    Session::new().congr_mult_step(p, q, r)
}

pub fn congr_ex_step(p: &Term, r: &Term) -> Res<NormalizationOutcome> {
    Session::new().congr_ex_step(p, r)
}

pub fn normalize_mult(p: &Term, r: &Term) -> Res<Term> {
    Session::new().normalize_mult(p, r)
}

pub fn normalize(p: &Term) -> Res<Term> {
    Session::new().normalize(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::bisimilar;
    use crate::syntax::parse;
    use crate::term::Vertex;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn bisim(p: &Term, q: &Term) -> bool {
        bisimilar(&Vertex::Term(p.clone()), &Vertex::Term(q.clone())).unwrap()
    }

    #[test]
    fn congr_examples() {
        assert!(congr(&t("a.b+a"), &t("(a.b+a)*0")).unwrap());
        assert!(!congr(&t("a.(a*a)"), &t("(a.(a*a))*0")).unwrap());
        assert!(congr(&t("0"), &t("a*0")).unwrap());
        assert!(congr(&t("0"), &t("0")).unwrap());
    }

    #[test]
    fn nfmult_examples() {
        assert!(is_nfmult(&t("0"), &t("(a.(a*a))*0")).unwrap());
        assert!(is_nfmult(&t("a*a"), &t("0")).unwrap());
        // the only star below is `a*a`, whose body has no proper reducts
        assert!(is_nfmult(&t("a.(a*a)"), &t("(a.(a*a))*0 . 0")).unwrap());
        assert!(!is_nfmult(&t("(a.(a*a))*0"), &t("0")).unwrap());
    }

    #[test]
    fn nf_examples() {
        assert!(is_nf(&t("(a.b+a)*0")).unwrap());
        assert!(!is_nf(&t("(a.(a*a))*0")).unwrap());
        assert!(is_nf(&t("0")).unwrap());
        assert!(is_nf(&t("a*b")).unwrap());
    }

    #[test]
    fn mult_step_examples() {
        use NormalizationOutcome::*;
        // q . r ↔ r
        assert_eq!(
            congr_mult_step(&t("a"), &t("c"), &t("c*0")).unwrap(),
            Multiplied(t("a"))
        );
        assert_eq!(
            congr_mult_step(&t("a"), &t("b"), &t("c*0")).unwrap(),
            Multiplied(t("a.b"))
        );
        assert_eq!(
            congr_mult_step(&t("0"), &t("b"), &t("c")).unwrap(),
            Multiplied(t("0"))
        );
    }

    #[test]
    fn ex_step_examples() {
        use NormalizationOutcome::*;
        assert_eq!(
            congr_ex_step(&t("a"), &t("b.c")).unwrap(),
            Multiplied(t("a"))
        );
        assert_eq!(congr_ex_step(&t("0"), &t("b")).unwrap(), Multiplied(t("0")));

        let r = t("(a + a.(a*a))*0");
        let p = t("a.(a*a)");
        match congr_ex_step(&p, &r).unwrap() {
            Collapsed(s) => {
                let s0 = Term::mult(s, Term::zero());
                assert!(bisim(&r, &s0));
                assert!(is_nf(&s0).unwrap());
                assert!(bisim(&s0, &t("(a+a)*0")));
            }
            other => panic!("expected a collapse, got {other:?}"),
        }
    }

    #[test]
    fn preconditions_are_checked() {
        let p = t("(a.(a*a))*0");
        let r = t("0");
        assert!(matches!(
            congr_ex_step(&p, &r),
            Err(NormalizeError::Precondition(_))
        ));
        assert!(matches!(
            congr_mult_step(&t("a"), &t("a*a"), &t("a*0")),
            Err(NormalizeError::Precondition(_))
        ));
    }

    #[test]
    fn normalize_mult_examples() {
        assert_eq!(normalize_mult(&t("0"), &t("a")).unwrap(), t("0"));
        assert_eq!(normalize_mult(&t("a.b"), &t("c")).unwrap(), t("a.b"));
        let p = t("a.(a*a)");
        let r = t("0");
        let q = normalize_mult(&p, &r).unwrap();
        assert!(bisim(
            &Term::mult(p, r.clone()),
            &Term::mult(q.clone(), r.clone())
        ));
        assert!(is_nfmult(&q, &r).unwrap());
    }

    fn check_normal_form(s: &str, expected: Option<&str>) {
        let p = t(s);
        let q = normalize(&p).unwrap();
        assert!(bisim(&p, &q), "{s} -> {q}");
        assert!(is_nf(&q).unwrap(), "{s} -> {q}");
        assert!(q.star_depth() <= p.star_depth(), "{s} -> {q}");
        if let Some(e) = expected {
            assert!(bisim(&q, &t(e)), "{s} -> {q}");
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&t("0")).unwrap(), t("0"));
        check_normal_form("(a.(a*a))*0", Some("(a+a)*0"));
        check_normal_form("(a.((a.(b.a+a))*c))*0", Some("a.(((a.(b.a+a))+c.a)*0)"));
        for s in [
            "(a.b+a)*0",
            "(a*b)*c",
            "a*(a*b)",
            "((a.b)*(b.a))*0",
            "(a.(b*(a.c)))*0",
            "(a + b.(a*b))*(c*0)",
        ] {
            check_normal_form(s, None);
        }
    }

    #[test]
    fn normal_forms_are_fixed_points_of_the_predicate() {
        let p = t("(a.b+a)*0");
        assert_eq!(normalize(&p).unwrap(), p);
    }
}
