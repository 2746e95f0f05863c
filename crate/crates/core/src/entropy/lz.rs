//! LZ78 codelength over the binary alphabet.
//!
//! The dictionary starts with only the empty phrase (index 0). The input is
//! parsed greedily: extend the current match while the trie has a child for
//! the next symbol, otherwise emit `(index of match, symbol)` and add the
//! extended phrase as a new entry. If the input ends inside a match, that
//! match is emitted as a final phrase without a new entry.
//!
//! Every phrase costs `ceil(log2(d + 1)) + 1` bits, where `d` is the number of
//! non-empty entries at the time it is emitted: the index field addresses
//! `d + 1` phrases and the symbol (or end marker) takes one bit.
//!
//! Conditional coding of `x` given `y` parses `y`, then emits a one-bit
//! separator choosing how `x` is coded: either from a fresh dictionary, or
//! from the dictionary left by `y` with every prefix of `y` inserted. The
//! cheaper choice is taken, so `K(x|y) <= K(x) + 1`. An empty `x` needs no
//! separator and costs nothing.

/// Width in bits of one phrase code when the dictionary has `entries`
/// non-empty phrases.
pub fn phrase_cost(entries: usize) -> u64 {
    ceil_log2(entries as u64 + 1) + 1
}

fn ceil_log2(n: u64) -> u64 {
    debug_assert!(n >= 1);
    (u64::BITS - (n - 1).leading_zeros()) as u64
}

#[derive(Debug, Clone)]
pub struct Lz78 {
    // children[node] = [child on 0, child on 1]; 0 = absent (root is never a child)
    children: Vec<[u32; 2]>,
}

impl Default for Lz78 {
    fn default() -> Self {
        Lz78 {
            children: vec![[0, 0]],
        }
    }
}

impl Lz78 {
    pub fn new() -> Self {
        Self::default()
    }

    /// Non-empty dictionary entries.
    pub fn entries(&self) -> usize {
        self.children.len() - 1
    }

    fn add_child(&mut self, node: usize, symbol: u8) -> usize {
        let id = self.children.len();
        self.children.push([0, 0]);
        self.children[node][symbol as usize] = id as u32;
        id
    }

    /// Parses `bits` with the current dictionary, extending it, and returns
    /// the codelength in bits.
    pub fn encode(&mut self, bits: &[u8]) -> u64 {
        let mut cost = 0;
        let mut node = 0usize;
        for &b in bits {
            let child = self.children[node][b as usize] as usize;
            if child != 0 {
                node = child;
            } else {
                cost += phrase_cost(self.entries());
                self.add_child(node, b);
                node = 0;
            }
        }
        if node != 0 {
            cost += phrase_cost(self.entries());
        }
        cost
    }

    /// Inserts every prefix of `bits` as a dictionary entry.
    pub fn commit_prefixes(&mut self, bits: &[u8]) {
        let mut node = 0usize;
        for &b in bits {
            let child = self.children[node][b as usize] as usize;
            node = if child != 0 { child } else { self.add_child(node, b) };
        }
    }
}

/// Codelength of `bits` from an empty dictionary.
pub fn codelength(bits: &[u8]) -> u64 {
    Lz78::new().encode(bits)
}

/// Codelength of `y · separator · x` minus the codelength of `y`.
pub fn conditional_codelength(x: &[u8], y: &[u8]) -> u64 {
    if x.is_empty() {
        return 0;
    }
    let mut primed = Lz78::new();
    primed.encode(y);
    primed.commit_prefixes(y);
    1 + primed.encode(x).min(codelength(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
    }

    #[test]
    fn hand_parsed_example() {
        // 0 | 1 | 00 | 01 | 10 -> costs 1, 2, 3, 3, 4
        let bits = [0, 1, 0, 0, 0, 1, 1, 0];
        assert_eq!(codelength(&bits), 1 + 2 + 3 + 3 + 4);
        // trailing partial match "0" after "0 | 1": index 1 of 2 entries -> 3
        assert_eq!(codelength(&[0, 1, 0]), 1 + 2 + 3);
    }

    #[test]
    fn empty_is_free() {
        assert_eq!(codelength(&[]), 0);
        assert_eq!(conditional_codelength(&[], &[1, 0, 1]), 0);
    }

    #[test]
    fn conditioning_on_self_is_one_phrase() {
        let x = vec![0u8; 256];
        let mut coder = Lz78::new();
        coder.encode(&x);
        coder.commit_prefixes(&x);
        let expected = 1 + phrase_cost(coder.entries());
        assert_eq!(conditional_codelength(&x, &x), expected);
        assert!(expected < 16);
    }

    #[test]
    fn separator_costs_at_most_one_bit() {
        let x = [1, 1, 0, 1, 0, 0, 1];
        let y = [0; 40];
        assert!(conditional_codelength(&x, &y) <= codelength(&x) + 1);
    }
}
