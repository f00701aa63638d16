//! Benchmark inputs shared by the criterion targets.

use qsc_core::algos::Op;
use qsc_core::qcore::gates;
use qsc_core::ConvCodeSpec;

/// `(2, 1, m)` code whose ancilla takes the parity of the input and the
/// memory.
pub fn parity_code(m: usize) -> ConvCodeSpec {
    let mut ops = vec![Op::new("cnot", gates::cnot(), &[0, 1 + m])];
    for q in 1..=m {
        ops.push(Op::new("cnot", gates::cnot(), &[q, 1 + m]));
    }
    ConvCodeSpec::new(2, 1, m, ops).expect("valid code")
}

/// A loop that applies `gate` `rounds` times to `|+⟩` and reads in X.
pub fn loop_circuit(gate: &str, rounds: u32) -> String {
    let mut s = format!("format=1\ntransistor g kind=choi:{gate}\ninput g.in state=+ mode=teleport\nloop g.out -> g.in\n");
    for c in 1..=rounds {
        if c > 1 {
            s.push_str(&format!("refresh g cycle={c}\n"));
        }
        s.push_str(&format!("signal g cycle={c}\n"));
    }
    s.push_str(&format!("readout g.out basis=X cycle={rounds}\n"));
    s
}
