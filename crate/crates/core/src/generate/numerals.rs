//! Slovak cardinal numerals for spoken-style house numbers.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gazetteer::HouseNumber;

const UNITS: [&str; 10] = ["", "jeden", "dva", "tri", "štyri", "päť", "šesť", "sedem", "osem", "deväť"];

const TEENS: [&str; 10] = [
    "desať",
    "jedenásť",
    "dvanásť",
    "trinásť",
    "štrnásť",
    "pätnásť",
    "šestnásť",
    "sedemnásť",
    "osemnásť",
    "devätnásť",
];

const TENS: [&str; 10] = [
    "",
    "",
    "dvadsať",
    "tridsať",
    "štyridsať",
    "päťdesiat",
    "šesťdesiat",
    "sedemdesiat",
    "osemdesiat",
    "deväťdesiat",
];

const HUNDREDS: [&str; 10] = [
    "", "sto", "dvesto", "tristo", "štyristo", "päťsto", "šesťsto", "sedemsto", "osemsto", "deväťsto",
];

/// Spoken separator for slash-composite numbers ("834/12").
pub const SLASH_WORD: &str = "lomeno";

/// The written cardinal for `n` in 1..=999, as one compound word
/// (e.g. 834 → "osemstotridsaťštyri").
pub fn cardinal(n: u32) -> Result<String> {
    if !(1..=999).contains(&n) {
        return Err(Error::HouseNumberOutOfRange(n));
    }
    let n = n as usize;
    let mut word = String::from(HUNDREDS[n / 100]);
    let rest = n % 100;
    match rest {
        0 => {}
        1..=9 => word.push_str(UNITS[rest]),
        10..=19 => word.push_str(TEENS[rest - 10]),
        _ => {
            word.push_str(TENS[rest / 10]);
            word.push_str(UNITS[rest % 10]);
        }
    }
    Ok(word)
}

/// Verbal house number as a token sequence; single words for 1..=999.
pub fn verbalize_house_number(n: u32) -> Result<Vec<String>> {
    Ok(alloc::vec![cardinal(n)?])
}

/// Verbal form of a possibly composite house number:
/// `834/12` → `["osemstotridsaťštyri", "lomeno", "dvanásť"]`.
pub fn verbalize(h: &HouseNumber) -> Vec<String> {
    let mut words = verbalize_house_number(h.main.into()).expect("house number in range");
    if let Some(sub) = h.sub {
        words.push(SLASH_WORD.into());
        words.extend(verbalize_house_number(sub.into()).expect("sub number in range"));
    }
    words
}
