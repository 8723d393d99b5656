//! `a..b` (inclusive) and comma-list parsing for `--k-list` style flags.

use std::fmt::Display;
use std::str::FromStr;

pub fn parse_list(text: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = parse_one(lo)?;
            let hi: u64 = parse_one(hi)?;
            if lo > hi {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(parse_one(part)?);
        }
    }
    Ok(out)
}

fn parse_one<T: FromStr>(text: &str) -> Result<T, String> {
    text.trim()
        .parse()
        .map_err(|_| format!("expected a non-negative integer, got {text:?}"))
}

pub fn join<T: Display>(values: &[T]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
