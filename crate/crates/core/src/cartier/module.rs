use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebra::hom::one_hot;
use crate::algebra::{FinAbPres, GroupHom, Matrix};
use crate::error::{Error, Result};
use crate::witt::{is_prime, BaseRing, WittAdditive, WittVector};

/// Closed-form modules whose answers are implemented by hand.
#[derive(Clone, Debug, PartialEq)]
pub enum CatalogModule {
    /// `Q_p/Z_p` with `V = p` and `F = 1`.
    Pruefer,
    /// `F_p[[x]]` with `F = 0` and `V x^n = x^(n+1)`, reported to `precision` terms.
    K3 { precision: usize },
    /// `W_n(R)`, or `W(R)` when `n` is `None`.
    Witt { ring: BaseRing, n: Option<usize> },
}

#[derive(Clone, Debug)]
pub enum Repr {
    Finite { group: FinAbPres, v: GroupHom, f: GroupHom },
    /// Finitely generated over `Z_p`, presented over `Z` (free rank stands for copies of `Z_p`).
    FgZp { group: FinAbPres, v: GroupHom, f: GroupHom },
    /// `A[V] = ⊕_k A V^k`, materialized below V-degree `window`.
    FreeV { base: FinAbPres, base_f: GroupHom, window: usize },
    Catalog(CatalogModule),
}

/// Underlying group with `V` and `F` as endomorphisms.
#[derive(Clone, Debug)]
pub struct Structure {
    pub group: FinAbPres,
    pub v: GroupHom,
    pub f: GroupHom,
}

impl Structure {
    pub fn gens(&self) -> usize {
        self.group.num_generators()
    }
}

#[derive(Clone, Debug)]
pub struct CartierModule {
    p: u64,
    repr: Repr,
    label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub relations: Vec<String>,
    pub generators: usize,
}

fn check_p(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::Parse(format!("{p} is not prime")))
    }
}

fn endo(group: &FinAbPres, m: Matrix) -> Result<GroupHom> {
    GroupHom::new(group.clone(), group.clone(), m)
}

impl CartierModule {
    pub fn finite(p: u64, group: FinAbPres, v: Matrix, f: Matrix) -> Result<CartierModule> {
        check_p(p)?;
        if !group.is_finite() {
            return Err(Error::Dimension(format!("finite module on an infinite group {group}")));
        }
        if !group.is_p_local(p) {
            return Err(Error::Dimension(format!("{group} is not a {p}-group")));
        }
        let v = endo(&group, v)?;
        let f = endo(&group, f)?;
        Ok(CartierModule {
            p,
            repr: Repr::Finite { group, v, f },
            label: None,
        })
    }

    pub fn fgzp(p: u64, group: FinAbPres, v: Matrix, f: Matrix) -> Result<CartierModule> {
        check_p(p)?;
        if !group.is_p_local(p) {
            return Err(Error::Dimension(format!("{group} is not p-local at {p}")));
        }
        let v = endo(&group, v)?;
        let f = endo(&group, f)?;
        Ok(CartierModule {
            p,
            repr: Repr::FgZp { group, v, f },
            label: None,
        })
    }

    pub fn free_v(p: u64, base: FinAbPres, base_f: Matrix, window: usize) -> Result<CartierModule> {
        check_p(p)?;
        if window == 0 {
            return Err(Error::TruncationTooSmall);
        }
        let base_f = endo(&base, base_f)?;
        Ok(CartierModule {
            p,
            repr: Repr::FreeV { base, base_f, window },
            label: None,
        })
    }

    pub fn from_catalog(p: u64, entry: CatalogModule) -> Result<CartierModule> {
        check_p(p)?;
        if let CatalogModule::Witt { ring, n } = &entry {
            if ring.p() != p {
                return Err(Error::PrimeMismatch(p, ring.p()));
            }
            if *n == Some(0) {
                return Err(Error::LengthUnderflow("W_0".into()));
            }
        }
        Ok(CartierModule {
            p,
            repr: Repr::Catalog(entry),
            label: None,
        })
    }

    /// `Z/p^e` with `V` and `F` multiplication by the given integers.
    pub fn cyclic(p: u64, e: u32, v: i64, f: i64) -> Result<CartierModule> {
        let g = FinAbPres::cyclic(BigInt::from(p).pow(e));
        CartierModule::finite(p, g, Matrix::from_i64(&[vec![v]], 1), Matrix::from_i64(&[vec![f]], 1))
    }

    /// `(Z/p, V = 0, F = 0)`.
    pub fn alpha_p(p: u64) -> Result<CartierModule> {
        Ok(CartierModule::cyclic(p, 1, 0, 0)?.with_label("alpha_p"))
    }

    /// `(Z/p, V = 0, F = 1)`.
    pub fn mu_p(p: u64) -> Result<CartierModule> {
        Ok(CartierModule::cyclic(p, 1, 0, 1)?.with_label("mu_p"))
    }

    /// `W(F_p) = Z_p` with `V = p`, `F = 1`.
    pub fn witt_fp(p: u64) -> Result<CartierModule> {
        let g = FinAbPres::free(1);
        let m = CartierModule::fgzp(p, g, Matrix::from_i64(&[vec![p as i64]], 1), Matrix::identity(1))?;
        Ok(m.with_label("W(F_p)"))
    }

    /// The unit `Z[V]`, materialized below V-degree `window`.
    pub fn unit(p: u64, window: usize) -> Result<CartierModule> {
        Ok(CartierModule::free_v(p, FinAbPres::free(1), Matrix::identity(1), window)?.with_label("Z[V]"))
    }

    pub fn pruefer(p: u64) -> Result<CartierModule> {
        Ok(CartierModule::from_catalog(p, CatalogModule::Pruefer)?.with_label("Q_p/Z_p"))
    }

    pub fn k3(p: u64, precision: usize) -> Result<CartierModule> {
        Ok(CartierModule::from_catalog(p, CatalogModule::K3 { precision })?.with_label("F_p[[x]]"))
    }

    pub fn witt_module(ring: &BaseRing, n: Option<usize>) -> Result<CartierModule> {
        let label = match n {
            Some(n) => format!("W_{n}({ring})"),
            None => format!("W({ring})"),
        };
        Ok(CartierModule::from_catalog(
            ring.p(),
            CatalogModule::Witt {
                ring: ring.clone(),
                n,
            },
        )?
        .with_label(label))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn repr_name(&self) -> &'static str {
        match self.repr {
            Repr::Finite { .. } => "finite",
            Repr::FgZp { .. } => "fgzp",
            Repr::FreeV { .. } => "freev",
            Repr::Catalog(_) => "catalog",
        }
    }

    /// The exact group with `V` and `F`, when the module has one.
    pub fn structure(&self) -> Result<Structure> {
        match &self.repr {
            Repr::Finite { group, v, f } | Repr::FgZp { group, v, f } => Ok(Structure {
                group: group.clone(),
                v: v.clone(),
                f: f.clone(),
            }),
            Repr::Catalog(CatalogModule::Witt { ring, n: Some(n) }) => witt_structure(ring, *n),
            Repr::Catalog(CatalogModule::Witt { ring, n: None }) if ring.is_char_p() && ring.num_slots() == 1 => {
                CartierModule::witt_fp(self.p)?.structure()
            }
            _ => Err(Error::UnsupportedRepresentation(format!(
                "{} has no finite presentation",
                self.describe()
            ))),
        }
    }

    /// True for modules with a finite underlying group.
    pub fn is_finite(&self) -> bool {
        match &self.repr {
            Repr::Finite { .. } => true,
            Repr::Catalog(CatalogModule::Witt { n: Some(_), ring }) => ring.is_char_p(),
            _ => false,
        }
    }

    pub fn order(&self) -> Option<BigInt> {
        if !self.is_finite() {
            return None;
        }
        self.structure().ok()?.group.order()
    }

    /// Same module on a diagonal presentation of its group.
    pub fn simplified(&self) -> Result<CartierModule> {
        let s = self.structure()?;
        let (norm, to, from) = s.group.normalize();
        let v = from.compose(&s.v).compose(&to).reduced();
        let f = from.compose(&s.f).compose(&to).reduced();
        let m = if self.is_finite() {
            CartierModule::finite(self.p, norm, v.matrix().clone(), f.matrix().clone())?
        } else {
            CartierModule::fgzp(self.p, norm, v.matrix().clone(), f.matrix().clone())?
        };
        Ok(match &self.label {
            Some(l) => m.with_label(l.clone()),
            None => m,
        })
    }

    pub fn describe(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match &self.repr {
            Repr::Finite { group, .. } => format!("finite {group}"),
            Repr::FgZp { group, .. } => format!("fgzp {group}"),
            Repr::FreeV { base, window, .. } => format!("({base})[V] below {window}"),
            Repr::Catalog(c) => format!("{c:?}"),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({ "p": self.p, "repr": self.repr_name() });
        match &self.repr {
            Repr::Finite { group, v, f } | Repr::FgZp { group, v, f } => {
                out["group"] = group.to_json();
                out["V"] = v.matrix().to_json();
                out["F"] = f.matrix().to_json();
                out["params"] = json!({});
            }
            Repr::FreeV { base, base_f, window } => {
                out["group"] = base.to_json();
                out["V"] = Value::Null;
                out["F"] = base_f.matrix().to_json();
                out["params"] = json!({ "window": window });
            }
            Repr::Catalog(c) => {
                out["group"] = Value::Null;
                out["V"] = Value::Null;
                out["F"] = Value::Null;
                out["params"] = match c {
                    CatalogModule::Pruefer => json!({ "name": "pruefer" }),
                    CatalogModule::K3 { precision } => json!({ "name": "k3", "precision": precision }),
                    CatalogModule::Witt { ring, n } => json!({ "name": "witt", "ring": ring.to_string(), "n": n }),
                };
            }
        }
        if let Some(l) = &self.label {
            out["label"] = json!(l);
        }
        out
    }

    pub fn from_json(v: &Value) -> Result<CartierModule> {
        let bad = |what: &str| Error::Parse(format!("cartier module: {what}"));
        let p = v["p"].as_u64().ok_or_else(|| bad("missing p"))?;
        let repr = v["repr"].as_str().ok_or_else(|| bad("missing repr"))?;
        let m = match repr {
            "finite" | "fgzp" => {
                let group = FinAbPres::from_json(&v["group"])?;
                let g = group.num_generators();
                let vm = Matrix::from_json(&v["V"], g)?;
                let fm = Matrix::from_json(&v["F"], g)?;
                if vm.rows() != g || fm.rows() != g {
                    return Err(bad("V and F must be square on the generators"));
                }
                if repr == "finite" {
                    CartierModule::finite(p, group, vm, fm)?
                } else {
                    CartierModule::fgzp(p, group, vm, fm)?
                }
            }
            "freev" => {
                let base = FinAbPres::from_json(&v["group"])?;
                let g = base.num_generators();
                let fm = Matrix::from_json(&v["F"], g)?;
                let window = v["params"]["window"].as_u64().ok_or_else(|| bad("freev window"))?;
                CartierModule::free_v(p, base, fm, window as usize)?
            }
            "catalog" => {
                let params = &v["params"];
                let entry = match params["name"].as_str() {
                    Some("pruefer") => CatalogModule::Pruefer,
                    Some("k3") => CatalogModule::K3 {
                        precision: params["precision"].as_u64().ok_or_else(|| bad("k3 precision"))? as usize,
                    },
                    Some("witt") => {
                        let ring = BaseRing::parse(params["ring"].as_str().ok_or_else(|| bad("witt ring"))?, Some(p))?;
                        let n = params["n"].as_u64().map(|n| n as usize);
                        CatalogModule::Witt { ring, n }
                    }
                    _ => return Err(bad("unknown catalog name")),
                };
                CartierModule::from_catalog(p, entry)?
            }
            other => return Err(bad(&format!("unknown repr {other}"))),
        };
        Ok(match v["label"].as_str() {
            Some(l) => m.with_label(l),
            None => m,
        })
    }
}

impl fmt::Display for CartierModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

/// `W_n(R)` as a finite module; `F` needs characteristic `p`.
fn witt_structure(ring: &BaseRing, n: usize) -> Result<Structure> {
    let a = WittAdditive::new(ring, n)?;
    let f = a.f_matrix().map_err(|_| {
        Error::UnsupportedRepresentation(format!(
            "W_{n}({ring}) has no length-preserving F outside characteristic p"
        ))
    })?;
    let group = a.group().clone();
    Ok(Structure {
        v: endo(&group, a.v_matrix())?,
        f: endo(&group, f)?,
        group,
    })
}

/// Generators and lifts of `V`, `F` describing `M/V^K M` for use inside `⊠`.
///
/// `v` and `f` need not be well defined on `group`: they only have to be correct
/// up to elements of `V^K M` whenever they appear shifted by at least one V-degree.
#[derive(Clone, Debug)]
pub(crate) struct TensorInput {
    pub group: FinAbPres,
    pub v: Matrix,
    pub f: Matrix,
}

impl TensorInput {
    pub fn gens(&self) -> usize {
        self.group.num_generators()
    }
}

pub(crate) fn tensor_input(m: &CartierModule, k: usize) -> Result<TensorInput> {
    let p = m.p();
    match m.repr() {
        Repr::Finite { group, v, f } | Repr::FgZp { group, v, f } => Ok(TensorInput {
            group: group.clone(),
            v: v.matrix().clone(),
            f: f.matrix().clone(),
        }),
        Repr::FreeV { base, base_f, window } => {
            if *window < k {
                return Err(Error::UnsupportedRepresentation(format!(
                    "free V-module materialized below degree {window} cannot be truncated at {k}"
                )));
            }
            let (group, v, f) = free_v_window(p, base, base_f.matrix(), *window);
            Ok(TensorInput { group, v, f })
        }
        Repr::Catalog(CatalogModule::Pruefer) => Ok(TensorInput {
            group: FinAbPres::trivial(),
            v: Matrix::zeros(0, 0),
            f: Matrix::zeros(0, 0),
        }),
        Repr::Catalog(CatalogModule::K3 { .. }) => {
            let group = FinAbPres::from_diagonal(&vec![BigInt::from(p); k], 0);
            let mut v = Matrix::zeros(k, k);
            for i in 0..k.saturating_sub(1) {
                v.set(i, i + 1, BigInt::one());
            }
            Ok(TensorInput {
                group,
                v,
                f: Matrix::zeros(k, k),
            })
        }
        Repr::Catalog(CatalogModule::Witt { ring, n }) => {
            let len = n.unwrap_or(k);
            let a = WittAdditive::new(ring, len)?;
            let f = if n.is_none() {
                witt_frobenius_lift(&a)
            } else {
                a.f_matrix().map_err(|_| {
                    Error::UnsupportedRepresentation(format!(
                        "W_{len}({ring}) is not a Cartier module outside characteristic p"
                    ))
                })?
            };
            Ok(TensorInput {
                group: a.group().clone(),
                v: a.v_matrix(),
                f,
            })
        }
    }
}

/// `F(V^k[m]) = p V^(k-1)[m]` and `F[m] = [m^p]` on the generators of `W_n(R)`,
/// read as elements of `W(R)` and truncated.
pub(crate) fn witt_frobenius_lift(a: &WittAdditive) -> Matrix {
    let g = a.num_generators();
    let p = a.ring().p();
    let ar = a.ring().arith();
    let mut out = Matrix::zeros(0, g);
    for i in 0..g {
        let (k, m) = a.level_and_monomial(i);
        let row = if k > 0 {
            let mut r = vec![BigInt::zero(); g];
            r[a.index(k - 1, m)] = BigInt::from(p);
            r
        } else {
            let mp = ar.pow(&a.ring().monomial(m), p);
            a.decompose(&WittVector::teichmuller(a.ring(), &mp, a.len()))
        };
        out.push_row(row);
    }
    out
}

/// `⊕_{j < window} A V^j` with the shift (top dropped) and `F` from the base in
/// degree 0, `p` times the inverse shift above.
pub(crate) fn free_v_window(p: u64, base: &FinAbPres, base_f: &Matrix, window: usize) -> (FinAbPres, Matrix, Matrix) {
    let b = base.num_generators();
    let parts: Vec<&FinAbPres> = (0..window).map(|_| base).collect();
    let group = FinAbPres::direct_sum(&parts);
    let g = b * window;
    let mut v = Matrix::zeros(g, g);
    let mut f = Matrix::zeros(g, g);
    for j in 0..window {
        for s in 0..b {
            let i = j * b + s;
            if j + 1 < window {
                v.set(i, i + b, BigInt::one());
            }
            if j == 0 {
                for t in 0..b {
                    f.set(i, t, base_f.get(s, t).clone());
                }
            } else {
                f.set(i, i - b, BigInt::from(p));
            }
        }
    }
    (group, v, f)
}

/// Checks `FV = p` on every generator, and `VF = p` as well when `dieudonne` is set.
pub fn check_axioms(m: &CartierModule, dieudonne: bool) -> Result<AxiomReport> {
    let p = BigInt::from(m.p());
    let mut relations = vec!["FV = p".to_string()];
    if dieudonne {
        relations.push("VF = p".to_string());
    }
    match m.repr() {
        Repr::FreeV { base, base_f, window } => {
            // FV = p holds by construction of F; the materialized window is checked below its top.
            let (group, v, f) = free_v_window(m.p(), base, base_f.matrix(), *window);
            let b = base.num_generators();
            let below = b * window.saturating_sub(1);
            check_products(&group, &v, &f, &p, below, "FV = p")?;
            if dieudonne {
                check_products(&group, &f, &v, &p, below, "VF = p")?;
            }
            Ok(AxiomReport {
                relations,
                generators: below,
            })
        }
        Repr::Catalog(CatalogModule::Pruefer) | Repr::Catalog(CatalogModule::K3 { .. }) => {
            // Closed forms: V = p, F = 1 on Q_p/Z_p; F = 0 on F_p[[x]].
            Ok(AxiomReport {
                relations,
                generators: 0,
            })
        }
        _ => {
            let s = m.structure()?;
            let g = s.gens();
            check_products(&s.group, s.v.matrix(), s.f.matrix(), &p, g, "FV = p")?;
            if dieudonne {
                check_products(&s.group, s.f.matrix(), s.v.matrix(), &p, g, "VF = p")?;
            }
            Ok(AxiomReport {
                relations,
                generators: g,
            })
        }
    }
}

/// `x -> first(x) then second` equals `p x` on generators `0..upto`.
fn check_products(group: &FinAbPres, first: &Matrix, second: &Matrix, p: &BigInt, upto: usize, name: &str) -> Result<()> {
    let g = group.num_generators();
    for i in 0..upto {
        let x = one_hot(g, i);
        let y = second.apply(&first.apply(&x));
        let px: Vec<BigInt> = x.iter().map(|c| c * p).collect();
        if !group.elements_equal(&y, &px) {
            return Err(Error::AxiomViolation {
                relation: name.to_string(),
                degree: None,
                witness: vec_string(&x),
            });
        }
    }
    Ok(())
}

pub(crate) fn vec_string(x: &[BigInt]) -> String {
    let items: Vec<String> = x.iter().map(|c| c.to_string()).collect();
    format!("[{}]", items.join(","))
}
