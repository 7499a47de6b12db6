use std::collections::BTreeSet;

use super::FixtureError;

/// Expands a set description into explicit members.
///
/// Terms are joined by `;` or `∪`. Each term is one of
/// `12`, `3..9`, `[3,9]`, `{1,2,3}`, `multiples of K in [A,B]`,
/// `multiples of K up to B`, `odd numbers between A and B`,
/// `even numbers in [A,B]`, `R mod K up to B` (also written `a≡R mod K`).
pub fn expand_set(text: &str) -> Result<BTreeSet<u64>, FixtureError> {
    let mut out = BTreeSet::new();
    for term in text.split([';', '∪']) {
        let term = term.trim();
        if !term.is_empty() {
            out.extend(expand_term(term)?);
        }
    }
    Ok(out)
}

fn bad(term: &str) -> FixtureError {
    FixtureError::Shorthand(term.to_string())
}

fn num(s: &str, term: &str) -> Result<u64, FixtureError> {
    s.trim().parse().map_err(|_| bad(term))
}

/// Parses `in [A,B]`, `between A and B`, `from A to B` or `up to B`.
fn bounds(rest: &str, term: &str) -> Result<(Option<u64>, u64), FixtureError> {
    let rest = rest.trim();
    if let Some(r) = rest.strip_prefix("in") {
        let (lo, hi) = interval(r.trim(), term)?;
        return Ok((Some(lo), hi));
    }
    for (head, mid) in [("between", "and"), ("from", "to")] {
        if let Some(r) = rest.strip_prefix(head) {
            let (lo, hi) = r.split_once(mid).ok_or_else(|| bad(term))?;
            return Ok((Some(num(lo, term)?), num(hi, term)?));
        }
    }
    if let Some(r) = rest.strip_prefix("up to") {
        return Ok((None, num(r, term)?));
    }
    Err(bad(term))
}

fn interval(s: &str, term: &str) -> Result<(u64, u64), FixtureError> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| bad(term))?;
    let (lo, hi) = inner.split_once(',').ok_or_else(|| bad(term))?;
    Ok((num(lo, term)?, num(hi, term)?))
}

fn progression(residue: u64, modulus: u64, lo: u64, hi: u64) -> BTreeSet<u64> {
    (lo..=hi).filter(|x| x % modulus == residue % modulus).collect()
}

fn expand_term(term: &str) -> Result<BTreeSet<u64>, FixtureError> {
    let t = term.to_lowercase();
    let t = t.strip_prefix("all ").unwrap_or(&t).trim();
    if let Ok(x) = t.parse::<u64>() {
        return Ok(BTreeSet::from([x]));
    }
    if let Some(inner) = t.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
        let mut out = BTreeSet::new();
        for x in inner.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            out.extend(expand_term(x)?);
        }
        return Ok(out);
    }
    if let Some((lo, hi)) = t.split_once("..") {
        return Ok((num(lo, term)?..=num(hi, term)?).collect());
    }
    if t.starts_with('[') {
        let (lo, hi) = interval(t, term)?;
        return Ok((lo..=hi).collect());
    }
    if let Some(rest) = t.strip_prefix("multiples of") {
        let rest = rest.trim();
        let (k, rest) = rest.split_once(' ').ok_or_else(|| bad(term))?;
        let k = num(k, term)?;
        if k == 0 {
            return Err(bad(term));
        }
        let (lo, hi) = bounds(rest, term)?;
        return Ok(progression(0, k, lo.unwrap_or(k), hi));
    }
    for (word, residue) in [("odd numbers", 1), ("even numbers", 0)] {
        if let Some(rest) = t.strip_prefix(word) {
            let (lo, hi) = bounds(rest, term)?;
            return Ok(progression(residue, 2, lo.unwrap_or(1 + residue), hi).into_iter().filter(|&x| x > 0).collect());
        }
    }
    // `R mod K ...`, optionally written `a≡R mod K ...`.
    let t = t.split_once('≡').map_or(t, |(_, r)| r.trim());
    if let Some((r, rest)) = t.split_once(" mod ") {
        let r = num(r, term)?;
        let (k, rest) = rest.trim().split_once(' ').ok_or_else(|| bad(term))?;
        let k = num(k, term)?;
        if k == 0 {
            return Err(bad(term));
        }
        let (lo, hi) = bounds(rest, term)?;
        let lo = lo.unwrap_or(if r % k == 0 { k } else { r % k });
        return Ok(progression(r, k, lo, hi));
    }
    Err(bad(term))
}
