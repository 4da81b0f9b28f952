/// Class code for ASD (a "Yes" answer in the screening class column).
pub const ASD: u8 = 0;
/// Class code for non-ASD.
pub const NON_ASD: u8 = 1;

/// Map a raw class string to its binary code.
///
/// Accepts the screening answers (`yes`/`no`), the facial dataset folder
/// names (`autistic`/`non_autistic`), `asd`/`non-asd`, and already-encoded
/// `0`/`1`. Matching is case-insensitive.
pub fn parse_label(raw: &str) -> Option<u8> {
    let v = raw.trim().to_ascii_lowercase().replace(['-', ' '], "_");
    match v.as_str() {
        "0" | "yes" | "asd" | "autistic" => Some(ASD),
        "1" | "no" | "non_asd" | "non_autistic" | "nonautistic" => Some(NON_ASD),
        _ => None,
    }
}

pub fn class_name(code: u8) -> &'static str {
    if code == ASD {
        "ASD"
    } else {
        "non-ASD"
    }
}
