//! Three interactive operations for the static demo page, each returning a
//! JSON string so the page needs no framework: inspect a twist family,
//! certify its invariant hyperplane, and tabulate a formal group law.
//!
//! The JSON builders are plain functions so they test on the host; the thin
//! `#[wasm_bindgen]` exports just forward to them.

use serde_json::{json, Value};
use twistlab::lubin_tate::{
    formal_log, lt_endomorphism, lubin_tate_law, CoefficientRing, TruncatedSeries,
};
use twistlab::trace_kernel::{invariant_hyperplanes, predicted_kernel, TwistFamily};
use twistlab::words::{fixes_delta_under, twist_family, PresentationSpec};
use wasm_bindgen::prelude::*;

fn err(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

/// The substitution twist family in degree d: member names, their images of
/// the generators, and whether each fixes the boundary word.
pub fn twist_family_json(d: u32) -> String {
    let spec = match PresentationSpec::new(d) {
        Ok(s) => s,
        Err(e) => return err(e),
    };
    let family = twist_family(&spec);
    let members: Vec<Value> = family
        .iter()
        .map(|e| {
            let images: Vec<String> = e
                .domain()
                .map(|g| format!("{g} -> {}", e.image(g).expect("domain image")))
                .collect();
            json!({
                "name": e.name.clone(),
                "images": images,
                "fixes_boundary": fixes_delta_under(&spec, e).unwrap_or(false),
            })
        })
        .collect();
    json!({
        "d": d,
        "genus": spec.g,
        "boundary": spec.boundary_word_x().to_string(),
        "size": members.len(),
        "members": members,
    })
    .to_string()
}

/// The unique invariant hyperplane of the abelianized family in degree d,
/// with the predicted basis next to the computed one.
pub fn trace_kernel_json(d: u32) -> String {
    let fam = match TwistFamily::for_degree(d) {
        Ok(f) => f,
        Err(e) => return err(e),
    };
    let predicted = match predicted_kernel(d) {
        Ok(k) => k,
        Err(e) => return err(e),
    };
    let planes = match invariant_hyperplanes(&fam) {
        Ok(p) => p,
        Err(e) => return err(e),
    };
    let rows = |s: &twistlab::ratmat::Subspace| -> Vec<Vec<String>> {
        s.basis_rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect()
    };
    json!({
        "d": d,
        "family": fam.names.clone(),
        "hyperplanes_found": planes.len(),
        "predicted_basis": rows(&predicted),
        "computed_basis": planes.first().map(rows),
        "matches": planes.len() == 1 && planes[0] == predicted,
    })
    .to_string()
}

fn series_rows(s: &TruncatedSeries) -> Vec<Value> {
    s.terms()
        .map(|(e, c)| {
            let exps: Vec<u16> = e.to_vec();
            let coeff: Vec<String> = c.coeffs().iter().map(|x| x.to_string()).collect();
            json!({ "exponents": exps, "coefficient": coeff })
        })
        .collect()
}

/// The formal group law for pi = p over the degree-f unramified ring, with
/// its logarithm and the multiplication-by-2 endomorphism, through the
/// degree cutoff.
pub fn lubin_tate_json(p: u64, f: u32, degree: u16, precision: i64) -> String {
    if degree > 12 {
        return err("degree cutoff is capped at 12 in the demo");
    }
    let ring = match CoefficientRing::new(p, f, precision) {
        Ok(r) => r,
        Err(e) => return err(e),
    };
    let pi = ring.int(p as i64);
    let law = match lubin_tate_law(&ring, &pi, ring.q(), degree) {
        Ok(l) => l,
        Err(e) => return err(e),
    };
    let log = match formal_log(&law, degree) {
        Ok(l) => l,
        Err(e) => return err(e),
    };
    let two = match lt_endomorphism(&law, &ring.int(2), degree) {
        Ok(t) => t,
        Err(e) => return err(e),
    };
    json!({
        "p": p,
        "f": f,
        "q": ring.q(),
        "modulus": ring.modulus(),
        "degree": degree,
        "precision": precision,
        "law": series_rows(&law.series),
        "logarithm": series_rows(&log),
        "mult_by_two": series_rows(&two),
    })
    .to_string()
}

#[wasm_bindgen]
pub fn twist_family_report(d: u32) -> String {
    twist_family_json(d)
}

#[wasm_bindgen]
pub fn trace_kernel_report(d: u32) -> String {
    trace_kernel_json(d)
}

#[wasm_bindgen]
pub fn lubin_tate_table(p: u64, f: u32, degree: u16, precision: i64) -> String {
    lubin_tate_json(p, f, degree, precision)
}
