//! Porter's original suffix-stripping algorithm. Each step is a list of
//! rules; the first rule whose suffix matches decides the step, whether or not
//! its condition holds.

type Cond = fn(&[char]) -> bool;

type Rule = (&'static str, &'static str, Option<Cond>);

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn consonant_flags(w: &[char]) -> Vec<bool> {
    let mut flags: Vec<bool> = Vec::with_capacity(w.len());
    for (i, &c) in w.iter().enumerate() {
        let f = if is_vowel(c) {
            false
        } else if c == 'y' {
            i == 0 || !flags[i - 1]
        } else {
            true
        };
        flags.push(f);
    }
    flags
}

fn is_consonant(w: &[char], i: usize) -> bool {
    consonant_flags(&w[..=i])[i]
}

/// Number of VC sequences in `[C](VC)^m[V]`.
fn measure(w: &[char]) -> usize {
    let flags = consonant_flags(w);
    flags.windows(2).filter(|p| !p[0] && p[1]).count()
}

fn contains_vowel(w: &[char]) -> bool {
    consonant_flags(w).iter().any(|c| !c)
}

fn ends_double_consonant(w: &[char]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1)
}

fn ends_cvc(w: &[char]) -> bool {
    let n = w.len();
    n >= 3
        && is_consonant(w, n - 3)
        && !is_consonant(w, n - 2)
        && is_consonant(w, n - 1)
        && !matches!(w[n - 1], 'w' | 'x' | 'y')
}

fn ends_with(w: &[char], suffix: &str) -> bool {
    let n = suffix.chars().count();
    n <= w.len() && w[w.len() - n..].iter().copied().eq(suffix.chars())
}

fn strip(w: &[char], suffix: &str) -> Vec<char> {
    w[..w.len() - suffix.chars().count()].to_vec()
}

fn join(mut stem: Vec<char>, replacement: &str) -> Vec<char> {
    stem.extend(replacement.chars());
    stem
}

fn apply(w: Vec<char>, rules: &[Rule]) -> Vec<char> {
    for (suffix, replacement, cond) in rules {
        if ends_with(&w, suffix) {
            let stem = strip(&w, suffix);
            return match cond {
                Some(c) if !c(&stem) => w,
                _ => join(stem, replacement),
            };
        }
    }
    w
}

fn m_gt0(s: &[char]) -> bool {
    measure(s) > 0
}

fn m_gt1(s: &[char]) -> bool {
    measure(s) > 1
}

fn step1a(w: Vec<char>) -> Vec<char> {
    apply(
        w,
        &[
            ("sses", "ss", None),
            ("ies", "i", None),
            ("ss", "ss", None),
            ("s", "", None),
        ],
    )
}

fn step1b(w: Vec<char>) -> Vec<char> {
    if ends_with(&w, "eed") {
        let stem = strip(&w, "eed");
        return if measure(&stem) > 0 { join(stem, "ee") } else { w };
    }
    let Some(stem) = ["ed", "ing"]
        .iter()
        .filter(|s| ends_with(&w, s))
        .map(|s| strip(&w, s))
        .find(|s| contains_vowel(s))
    else {
        return w;
    };
    for (suffix, replacement) in [("at", "ate"), ("bl", "ble"), ("iz", "ize")] {
        if ends_with(&stem, suffix) {
            return join(strip(&stem, suffix), replacement);
        }
    }
    if ends_double_consonant(&stem) {
        let last = stem[stem.len() - 1];
        if matches!(last, 'l' | 's' | 'z') {
            return stem;
        }
        return stem[..stem.len() - 1].to_vec();
    }
    if measure(&stem) == 1 && ends_cvc(&stem) {
        return join(stem, "e");
    }
    stem
}

fn step1c(w: Vec<char>) -> Vec<char> {
    apply(w, &[("y", "i", Some(contains_vowel))])
}

fn step2(w: Vec<char>) -> Vec<char> {
    const P: Option<Cond> = Some(m_gt0);
    apply(
        w,
        &[
            ("ational", "ate", P),
            ("tional", "tion", P),
            ("enci", "ence", P),
            ("anci", "ance", P),
            ("izer", "ize", P),
            ("abli", "able", P),
            ("alli", "al", P),
            ("entli", "ent", P),
            ("eli", "e", P),
            ("ousli", "ous", P),
            ("ization", "ize", P),
            ("ation", "ate", P),
            ("ator", "ate", P),
            ("alism", "al", P),
            ("iveness", "ive", P),
            ("fulness", "ful", P),
            ("ousness", "ous", P),
            ("aliti", "al", P),
            ("iviti", "ive", P),
            ("biliti", "ble", P),
        ],
    )
}

fn step3(w: Vec<char>) -> Vec<char> {
    const P: Option<Cond> = Some(m_gt0);
    apply(
        w,
        &[
            ("icate", "ic", P),
            ("ative", "", P),
            ("alize", "al", P),
            ("iciti", "ic", P),
            ("ical", "ic", P),
            ("ful", "", P),
            ("ness", "", P),
        ],
    )
}

fn ion_cond(s: &[char]) -> bool {
    measure(s) > 1 && matches!(s.last(), Some('s' | 't'))
}

fn step4(w: Vec<char>) -> Vec<char> {
    const P: Option<Cond> = Some(m_gt1);
    apply(
        w,
        &[
            ("al", "", P),
            ("ance", "", P),
            ("ence", "", P),
            ("er", "", P),
            ("ic", "", P),
            ("able", "", P),
            ("ible", "", P),
            ("ant", "", P),
            ("ement", "", P),
            ("ment", "", P),
            ("ent", "", P),
            ("ion", "", Some(ion_cond)),
            ("ou", "", P),
            ("ism", "", P),
            ("ate", "", P),
            ("iti", "", P),
            ("ous", "", P),
            ("ive", "", P),
            ("ize", "", P),
        ],
    )
}

fn step5a(w: Vec<char>) -> Vec<char> {
    if ends_with(&w, "e") {
        let stem = strip(&w, "e");
        let m = measure(&stem);
        if m > 1 || (m == 1 && !ends_cvc(&stem)) {
            return stem;
        }
    }
    w
}

fn step5b(w: Vec<char>) -> Vec<char> {
    if ends_with(&w, "ll") && measure(&w[..w.len() - 1]) > 1 {
        return w[..w.len() - 1].to_vec();
    }
    w
}

/// Stems a single word. Input is lowercased first.
pub fn stem(word: &str) -> String {
    let w: Vec<char> = word.to_lowercase().chars().collect();
    let w = step5b(step5a(step4(step3(step2(step1c(step1b(step1a(w))))))));
    w.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_examples() {
        for (w, s) in [
            ("caresses", "caress"),
            ("ponies", "poni"),
            ("agreed", "agre"),
            ("hopping", "hop"),
            ("filing", "file"),
            ("happy", "happi"),
            ("relational", "relat"),
            ("generalization", "gener"),
            ("argument", "argument"),
            ("splitting", "split"),
            ("whitespaces", "whitespac"),
            ("is", "i"),
        ] {
            assert_eq!(stem(w), s, "{w}");
        }
    }

    #[test]
    fn y_after_consonant_is_a_vowel() {
        assert_eq!(measure(&"toy".chars().collect::<Vec<_>>()), 1);
        assert_eq!(measure(&"syzygy".chars().collect::<Vec<_>>()), 2);
    }
}
