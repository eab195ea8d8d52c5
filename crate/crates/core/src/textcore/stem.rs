//! Porter's suffix-stripping stemmer (reference-implementation rule set),
//! applied until the output stops changing.
//!
//! A single Porter pass is not idempotent (`agreed -> agre -> agr`), so the
//! public [`stem`] repeats the pass to a fixed point. That keeps
//! `stem(stem(w)) == stem(w)` for every input. One rule differs from the
//! 1980 step 1a: a final `s` after `u` is kept (as in Porter2), otherwise the
//! fixed point would erode `effus` to `effu`.

const MAX_PASSES: usize = 8;

/// Stems a lowercased token. Tokens of two characters or fewer are returned as is.
pub fn stem(word: &str) -> String {
    let mut current = word.to_string();
    for _ in 0..MAX_PASSES {
        let next = porter_pass(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn porter_pass(word: &str) -> String {
    let b: Vec<char> = word.chars().collect();
    if b.len() <= 2 {
        return word.to_string();
    }
    let mut s = Stemmer { k: b.len() - 1, j: 0, b };
    s.step1ab();
    if s.k > 0 {
        s.step1c();
        s.step2();
        s.step3();
        s.step4();
        s.step5();
    }
    s.b[..=s.k].iter().collect()
}

struct Stemmer {
    b: Vec<char>,
    /// index of the last character of the current word
    k: usize,
    /// index of the last character of the stem before a matched suffix
    j: usize,
}

impl Stemmer {
    fn cons(&self, i: usize) -> bool {
        match self.b[i] {
            'a' | 'e' | 'i' | 'o' | 'u' => false,
            'y' => i == 0 || !self.cons(i - 1),
            _ => true,
        }
    }

    /// Number of VC sequences in b[0..=j].
    fn m(&self) -> usize {
        let j = self.j as isize;
        let mut n = 0;
        let mut i: isize = 0;
        loop {
            if i > j {
                return n;
            }
            if !self.cons(i as usize) {
                break;
            }
            i += 1;
        }
        i += 1;
        loop {
            loop {
                if i > j {
                    return n;
                }
                if self.cons(i as usize) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i > j {
                    return n;
                }
                if !self.cons(i as usize) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..=self.j).any(|i| !self.cons(i))
    }

    fn double_cons(&self, j: usize) -> bool {
        j >= 1 && self.b[j] == self.b[j - 1] && self.cons(j)
    }

    /// consonant-vowel-consonant ending at i, last consonant not w, x or y
    fn cvc(&self, i: usize) -> bool {
        if i < 2 || !self.cons(i) || self.cons(i - 1) || !self.cons(i - 2) {
            return false;
        }
        !matches!(self.b[i], 'w' | 'x' | 'y')
    }

    fn ends(&mut self, suffix: &str) -> bool {
        let suf: Vec<char> = suffix.chars().collect();
        let len = suf.len();
        if len > self.k + 1 {
            return false;
        }
        let start = self.k + 1 - len;
        if self.b[start..=self.k] != suf[..] {
            return false;
        }
        // j may wrap below zero for a whole-word match; callers guard with m()
        self.j = if start == 0 { usize::MAX } else { start - 1 };
        true
    }

    fn set_to(&mut self, replacement: &str) {
        let start = self.j.wrapping_add(1);
        self.b.truncate(start);
        self.b.extend(replacement.chars());
        self.k = self.b.len() - 1;
    }

    fn stem_nonempty(&self) -> bool {
        self.j != usize::MAX
    }

    fn replace_if_m(&mut self, replacement: &str) {
        if self.stem_nonempty() && self.m() > 0 {
            self.set_to(replacement);
        }
    }

    fn step1ab(&mut self) {
        if self.b[self.k] == 's' {
            if self.ends("sses") {
                self.k -= 2;
            } else if self.ends("ies") {
                self.set_to("i");
            } else if self.k >= 1 && !matches!(self.b[self.k - 1], 's' | 'u') {
                self.k -= 1;
            }
            self.b.truncate(self.k + 1);
        }
        if self.ends("eed") {
            if self.stem_nonempty() && self.m() > 0 {
                self.k -= 1;
                self.b.truncate(self.k + 1);
            }
        } else if (self.ends("ed") || self.ends("ing")) && self.stem_nonempty() && self.vowel_in_stem() {
            self.k = self.j;
            self.b.truncate(self.k + 1);
            if self.ends("at") {
                self.set_to("ate");
            } else if self.ends("bl") {
                self.set_to("ble");
            } else if self.ends("iz") {
                self.set_to("ize");
            } else if self.double_cons(self.k) {
                if !matches!(self.b[self.k], 'l' | 's' | 'z') {
                    self.k -= 1;
                    self.b.truncate(self.k + 1);
                }
            } else {
                self.j = self.k;
                if self.m() == 1 && self.cvc(self.k) {
                    self.set_to_after_k("e");
                }
            }
        }
    }

    fn set_to_after_k(&mut self, extra: &str) {
        self.b.truncate(self.k + 1);
        self.b.extend(extra.chars());
        self.k = self.b.len() - 1;
    }

    fn step1c(&mut self) {
        if self.ends("y") && self.stem_nonempty() && self.vowel_in_stem() {
            self.b[self.k] = 'i';
        }
    }

    fn step2(&mut self) {
        if self.k < 1 {
            return;
        }
        let rules: &[(&str, &str)] = match self.b[self.k - 1] {
            'a' => &[("ational", "ate"), ("tional", "tion")],
            'c' => &[("enci", "ence"), ("anci", "ance")],
            'e' => &[("izer", "ize")],
            'l' => &[("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous")],
            'o' => &[("ization", "ize"), ("ation", "ate"), ("ator", "ate")],
            's' => &[("alism", "al"), ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous")],
            't' => &[("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")],
            'g' => &[("logi", "log")],
            _ => &[],
        };
        for &(suffix, replacement) in rules {
            if self.ends(suffix) {
                self.replace_if_m(replacement);
                return;
            }
        }
    }

    fn step3(&mut self) {
        let rules: &[(&str, &str)] = match self.b[self.k] {
            'e' => &[("icate", "ic"), ("ative", ""), ("alize", "al")],
            'i' => &[("iciti", "ic")],
            'l' => &[("ical", "ic"), ("ful", "")],
            's' => &[("ness", "")],
            _ => &[],
        };
        for &(suffix, replacement) in rules {
            if self.ends(suffix) {
                self.replace_if_m(replacement);
                return;
            }
        }
    }

    fn step4(&mut self) {
        if self.k < 1 {
            return;
        }
        let suffixes: &[&str] = match self.b[self.k - 1] {
            'a' => &["al"],
            'c' => &["ance", "ence"],
            'e' => &["er"],
            'i' => &["ic"],
            'l' => &["able", "ible"],
            'n' => &["ant", "ement", "ment", "ent"],
            'o' => &["ion", "ou"],
            's' => &["ism"],
            't' => &["ate", "iti"],
            'u' => &["ous"],
            'v' => &["ive"],
            'z' => &["ize"],
            _ => &[],
        };
        let mut matched = false;
        for &suffix in suffixes {
            if self.ends(suffix) {
                if suffix == "ion" {
                    // only after s or t
                    if !(self.stem_nonempty() && matches!(self.b[self.j], 's' | 't')) {
                        continue;
                    }
                }
                matched = true;
                break;
            }
        }
        if matched && self.stem_nonempty() && self.m() > 1 {
            self.k = self.j;
            self.b.truncate(self.k + 1);
        }
    }

    fn step5(&mut self) {
        self.j = self.k;
        if self.b[self.k] == 'e' && self.k >= 1 {
            self.j = self.k - 1;
            let a = self.m();
            if a > 1 || (a == 1 && !self.cvc(self.k - 1)) {
                self.k -= 1;
                self.b.truncate(self.k + 1);
            }
        }
        if self.b[self.k] == 'l' && self.double_cons(self.k) {
            self.j = self.k;
            if self.m() > 1 {
                self.k -= 1;
                self.b.truncate(self.k + 1);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clinical_plurals() {
        assert_eq!(stem("consolidations"), "consolid");
        assert_eq!(stem("effusions"), "effus");
        assert_eq!(stem("run"), "run");
        assert_eq!(stem("cats"), "cat");
    }

    #[test]
    fn reference_vocabulary() {
        // pairs from the reference Porter test vocabulary
        let cases = [
            ("caresses", "caress"),
            ("ponies", "poni"),
            ("caress", "caress"),
            ("feed", "feed"),
            ("plastered", "plaster"),
            ("motoring", "motor"),
            ("conflated", "conflat"),
            ("hopping", "hop"),
            ("filing", "file"),
            ("happy", "happi"),
            ("relational", "relat"),
            ("conditional", "condit"),
            ("rational", "ration"),
            ("digitizer", "digit"),
            ("hopefulness", "hope"),
            ("triplicate", "triplic"),
            ("electrical", "electr"),
            ("adjustable", "adjust"),
            ("adoption", "adopt"),
            ("controlling", "control"),
            ("generalizations", "gener"),
            ("oscillators", "oscil"),
        ];
        for (w, want) in cases {
            assert_eq!(stem(w), want, "{w}");
        }
    }

    #[test]
    fn single_pass_non_idempotence_is_absorbed() {
        assert_eq!(porter_pass("agreed"), "agre");
        assert_eq!(stem("agreed"), "agr");
        assert_eq!(stem("status"), "status");
        assert_eq!(stem("agreed"), stem(&stem("agreed")));
    }

    proptest! {
        #[test]
        fn idempotent(w in "[a-z]{1,14}") {
            let once = stem(&w);
            prop_assert_eq!(stem(&once), once);
        }
    }
}
