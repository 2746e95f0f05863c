//! A tiny reference machine for exact, enumeration-based complexity.
//!
//! A program is a bit string read left to right as a sequence of instructions
//! from a complete prefix code:
//!
//! | code  | name   | effect                                                  |
//! |-------|--------|---------------------------------------------------------|
//! | `00`  | `ZERO` | append 0 to the output                                  |
//! | `01`  | `ONE`  | append 1 to the output                                  |
//! | `100` | `READ` | append the next input bit; no-op if the input is spent  |
//! | `101` | `DUP`  | output := output · output                               |
//! | `110` | `REST` | append every remaining input bit                        |
//! | `111` | `FLIP` | complement every output bit written so far              |
//!
//! Machine state is the output tape (initially empty) and a read-only input
//! tape holding the conditioning string (empty for unconditional runs) with a
//! head that only moves right. Each instruction is one step. The machine halts
//! when the program is exhausted exactly at an instruction boundary; a program
//! ending inside an instruction code is malformed and produces nothing. A run
//! that needs more steps than the budget, or whose output would exceed
//! [`MAX_OUTPUT_BITS`], is treated as non-halting.
//!
//! Programs are enumerated in shortlex order: by length, then as big-endian
//! integers. The first program that outputs a string is its shortest
//! description, and ties resolve to the lexicographically smallest program.

use std::collections::HashMap;

use crate::par::Exec;

pub const MAX_OUTPUT_BITS: u32 = 64;
pub const DEFAULT_STEP_BUDGET: u64 = 10_000;
/// Longest program the enumerator accepts.
pub const MAX_PROGRAM_LEN: u32 = 20;
/// Longest target string the enumerator accepts.
pub const MAX_TARGET_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instr {
    Zero,
    One,
    Read,
    Dup,
    Rest,
    Flip,
}

/// Result of running one program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Halted(Output),
    Malformed,
    OutOfBudget,
    Overflow,
}

/// Output tape packed into a `u64`, most significant written bit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Output {
    pub len: u32,
    pub bits: u64,
}

impl Output {
    pub fn from_bits(bits: &[u8]) -> Option<Self> {
        if bits.len() > MAX_OUTPUT_BITS as usize {
            return None;
        }
        let packed = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        Some(Output {
            len: bits.len() as u32,
            bits: packed,
        })
    }

    pub fn to_bits(self) -> Vec<u8> {
        (0..self.len)
            .map(|i| ((self.bits >> (self.len - 1 - i)) & 1) as u8)
            .collect()
    }

    fn mask(len: u32) -> u64 {
        if len >= 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        }
    }
}

/// A program of `len` bits stored big-endian in the low bits of `code`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Program {
    pub len: u32,
    pub code: u32,
}

impl Program {
    pub fn parse(bits: &str) -> Option<Self> {
        if bits.len() > 32 {
            return None;
        }
        let mut code = 0u32;
        for c in bits.chars() {
            code = (code << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return None,
                };
        }
        Some(Program {
            len: bits.len() as u32,
            code,
        })
    }

    fn bit(self, i: u32) -> u32 {
        (self.code >> (self.len - 1 - i)) & 1
    }

    /// Splits the program into instructions, or `None` if it ends inside a code.
    pub fn decode(self) -> Option<Vec<Instr>> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.len {
            let (instr, width) = self.decode_at(i)?;
            out.push(instr);
            i += width;
        }
        Some(out)
    }

    fn decode_at(self, i: u32) -> Option<(Instr, u32)> {
        let rem = self.len - i;
        if self.bit(i) == 0 {
            if rem < 2 {
                return None;
            }
            let instr = if self.bit(i + 1) == 0 { Instr::Zero } else { Instr::One };
            Some((instr, 2))
        } else {
            if rem < 3 {
                return None;
            }
            let instr = match (self.bit(i + 1), self.bit(i + 2)) {
                (0, 0) => Instr::Read,
                (0, 1) => Instr::Dup,
                (1, 0) => Instr::Rest,
                _ => Instr::Flip,
            };
            Some((instr, 3))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceMachine {
    pub step_budget: u64,
}

impl Default for ReferenceMachine {
    fn default() -> Self {
        ReferenceMachine {
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

impl ReferenceMachine {
    pub fn with_step_budget(step_budget: u64) -> Self {
        ReferenceMachine { step_budget }
    }

    pub fn run(&self, program: Program, input: &[u8]) -> Outcome {
        let mut out = Output { len: 0, bits: 0 };
        let mut head = 0usize;
        let mut steps = 0u64;
        let mut i = 0;
        while i < program.len {
            let Some((instr, width)) = program.decode_at(i) else {
                return Outcome::Malformed;
            };
            i += width;
            steps += 1;
            if steps > self.step_budget {
                return Outcome::OutOfBudget;
            }
            let ok = match instr {
                Instr::Zero => push(&mut out, 0),
                Instr::One => push(&mut out, 1),
                Instr::Read => match input.get(head) {
                    Some(&b) => {
                        head += 1;
                        push(&mut out, b)
                    }
                    None => true,
                },
                Instr::Rest => {
                    let mut ok = true;
                    while ok && head < input.len() {
                        ok = push(&mut out, input[head]);
                        head += 1;
                    }
                    ok
                }
                Instr::Dup => {
                    if out.len * 2 > MAX_OUTPUT_BITS {
                        false
                    } else {
                        if out.len > 0 {
                            out.bits = (out.bits << out.len) | out.bits;
                        }
                        out.len *= 2;
                        true
                    }
                }
                Instr::Flip => {
                    out.bits ^= Output::mask(out.len);
                    true
                }
            };
            if !ok {
                return Outcome::Overflow;
            }
        }
        Outcome::Halted(out)
    }

    /// Length of the shortest program of at most `max_len` bits that outputs
    /// `target` given `input`, searching in shortlex order.
    pub fn shortest(&self, target: &[u8], input: &[u8], max_len: u32, exec: Exec) -> Option<u32> {
        let want = Output::from_bits(target)?;
        (0..=max_len).find(|&len| {
            exec.position_first(1usize << len, |code| {
                self.run(Program { len, code: code as u32 }, input) == Outcome::Halted(want)
            })
            .is_some()
        })
    }

    /// Shortest program length for every output reachable with at most
    /// `max_len` program bits.
    pub fn shortest_table(&self, input: &[u8], max_len: u32, exec: Exec) -> HashMap<Output, u32> {
        let mut table = HashMap::new();
        for len in 0..=max_len {
            let outcomes = exec.map_range(1usize << len, |code| {
                self.run(Program { len, code: code as u32 }, input)
            });
            for outcome in outcomes {
                if let Outcome::Halted(out) = outcome {
                    table.entry(out).or_insert(len);
                }
            }
        }
        table
    }
}

fn push(out: &mut Output, b: u8) -> bool {
    if out.len >= MAX_OUTPUT_BITS {
        return false;
    }
    out.bits = (out.bits << 1) | b as u64;
    out.len += 1;
    true
}
