/// Six significant digits, trailing zeros trimmed.
pub fn g6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent");
        return format!("{}e{exp}", trim(mantissa));
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    trim(&s).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn g6_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| g6(x)).collect();
    format!("[{}]", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(g6(48.166666666), "48.1667");
        assert_eq!(g6(6.632546875), "6.63255");
        assert_eq!(g6(52.0), "52");
        assert_eq!(g6(0.0), "0");
        assert_eq!(g6(-0.5), "-0.5");
        assert_eq!(g6(1.0 / 3.0), "0.333333");
        assert_eq!(g6(1.5e-7), "1.5e-7");
        assert_eq!(g6(123456789.0), "1.23457e8");
    }
}
