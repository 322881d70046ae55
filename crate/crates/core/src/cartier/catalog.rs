use super::module::CartierModule;
use crate::error::{Error, Result};
use crate::witt::BaseRing;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub module: CartierModule,
    pub complete: bool,
}

/// The fixed library, with K3 reported to `precision` terms.
pub fn catalog(p: u64, precision: usize) -> Result<Vec<CatalogEntry>> {
    let fp = BaseRing::fp(p)?;
    let fpx = BaseRing::truncated(p, 1, &[("x", 2)])?;
    let entry = |name: &str, module: CartierModule, complete: bool| CatalogEntry {
        name: name.to_string(),
        module,
        complete,
    };
    Ok(vec![
        entry("alpha_p", CartierModule::alpha_p(p)?, true),
        entry("mu_p", CartierModule::mu_p(p)?, true),
        entry("W_3(F_p)", CartierModule::witt_module(&fp, Some(3))?, true),
        entry("W_2(F_p[x]/x^2)", CartierModule::witt_module(&fpx, Some(2))?, true),
        entry("W(F_p)", CartierModule::witt_fp(p)?, true),
        entry("pruefer", CartierModule::pruefer(p)?, false),
        entry("K3", CartierModule::k3(p, precision)?, true),
    ])
}

/// Finite entries of the catalog.
pub fn finite_catalog(p: u64) -> Result<Vec<CatalogEntry>> {
    Ok(catalog(p, 1)?.into_iter().filter(|e| e.module.is_finite()).collect())
}

/// Resolves `alpha_p`, `mu_p`, `W(F_p)`, `pruefer`, `K3`, `unit` or `witt:<ring>[:<n>]`.
pub fn lookup(name: &str, p: u64, precision: usize) -> Result<CartierModule> {
    if let Some(rest) = name.strip_prefix("witt:") {
        let (ring, n) = match rest.rsplit_once(':') {
            Some((r, n)) if n.chars().all(|c| c.is_ascii_digit()) => {
                (r, Some(n.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?))
            }
            _ => (rest, None),
        };
        return CartierModule::witt_module(&BaseRing::parse(ring, Some(p))?, n);
    }
    for e in catalog(p, precision)? {
        if e.name.eq_ignore_ascii_case(name) {
            return Ok(e.module);
        }
    }
    match name.to_ascii_lowercase().as_str() {
        "unit" | "z[v]" => CartierModule::unit(p, precision.max(1)),
        "witt_fp" => CartierModule::witt_fp(p),
        _ => Err(Error::Parse(format!("unknown catalog module {name}"))),
    }
}
