use dlgn::circuit::{
    eval_packed, export, parse_netlist, read_netlist, render_netlist, write_netlist, write_predictions, HardCircuit,
    HardGate, PackedBits,
};
use dlgn::codebook::{GateId, CODEBOOK};
use dlgn::netarch::{predict, Batch, Method, Mode, NetworkConfig};
use dlgn::trainers::Model;
use dlgn::Exec;
use proptest::prelude::*;

/// Float evaluation of the snapped polynomials with GroupSum and argmax.
fn polynomial_oracle(c: &HardCircuit, row: &[bool]) -> u32 {
    let mut x: Vec<f64> = row.iter().map(|&v| f64::from(u8::from(v))).collect();
    for layer in &c.layers {
        x = layer
            .iter()
            .map(|g| {
                let r = CODEBOOK[g.gate.index()].map(f64::from);
                let (a, b) = (x[g.in0 as usize], x[g.in1 as usize]);
                r[0] + r[1] * a + r[2] * b + r[3] * a * b
            })
            .collect();
    }
    let per = x.len() / c.classes;
    let sums: Vec<f64> = x.chunks(per).map(|g| g.iter().sum()).collect();
    let mut best = 0;
    for (i, &s) in sums.iter().enumerate() {
        if s > sums[best] {
            best = i;
        }
    }
    best as u32
}

fn circuit_strategy() -> impl Strategy<Value = (HardCircuit, Vec<Vec<bool>>)> {
    (2usize..12, 1usize..5, 1usize..4, 2usize..5, 1usize..150).prop_flat_map(|(dim, depth, classes, per, rows)| {
        let width = classes * per;
        let layers = (0..depth)
            .map(|l| {
                let src = if l == 0 { dim } else { width } as u32;
                prop::collection::vec(
                    (0u8..16, 0..src, 1..src).prop_map(move |(g, a, off)| HardGate {
                        gate: GateId::new(g).unwrap(),
                        in0: a,
                        in1: (a + off) % src,
                    }),
                    width,
                )
            })
            .collect::<Vec<_>>();
        let data = prop::collection::vec(prop::collection::vec(any::<bool>(), dim), rows);
        (layers, data).prop_map(move |(layers, data)| {
            (
                HardCircuit {
                    input_dim: dim,
                    classes,
                    layers,
                },
                data,
            )
        })
    })
}

fn pack_rows(rows: &[Vec<bool>], dim: usize) -> PackedBits {
    let f: Vec<f32> = rows.iter().flatten().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    PackedBits::pack(&f, dim)
}

/// Two-neuron, two-class circuit whose prediction is the output of `g`.
fn single_gate_circuit(g: GateId) -> HardCircuit {
    HardCircuit {
        input_dim: 2,
        classes: 2,
        layers: vec![vec![
            HardGate {
                gate: GateId::FALSE,
                in0: 0,
                in1: 1,
            },
            HardGate { gate: g, in0: 0, in1: 1 },
        ]],
    }
}

#[test]
fn packed_gate_words() {
    // Lanes 0..4 carry a = 1100 and b = 1010 read from the most significant lane.
    let rows = vec![vec![false, false], vec![false, true], vec![true, false], vec![true, true]];
    let packed = pack_rows(&rows, 2);
    let word = |g| {
        eval_packed(&single_gate_circuit(g), &packed, Exec::Sequential)
            .unwrap()
            .iter()
            .enumerate()
            .fold(0u8, |w, (i, &p)| w | ((p as u8) << i))
    };
    assert_eq!(word(GateId::AND), 0b1000);
    assert_eq!(word(GateId::XOR), 0b0110);
    assert_eq!(word(GateId::OR), 0b1110);
    assert_eq!(word(GateId::TRUE), 0b1111);
}

#[test]
fn padding_lanes_do_not_leak() {
    // 65 rows spill one lane into a second word; TRUE everywhere must still give 65 ones.
    let rows = vec![vec![false, false]; 65];
    let p = eval_packed(&single_gate_circuit(GateId::TRUE), &pack_rows(&rows, 2), Exec::Parallel).unwrap();
    assert_eq!(p, vec![1; 65]);
}

#[test]
fn dimension_mismatch_names_both_widths() {
    let c = single_gate_circuit(GateId::AND);
    let err = eval_packed(&c, &pack_rows(&[vec![true; 3]], 3), Exec::Sequential).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains('2') && msg.contains('3'), "{msg}");
}

#[test]
fn netlist_rejects_bad_input() {
    let c = single_gate_circuit(GateId::AND);
    let text = render_netlist(&c);
    assert!(text.starts_with("DLGN v1\nconfig 2 1 2 2\n"));

    let bad = text.replace("AND", "ANDD");
    let err = parse_netlist(&bad).unwrap_err().to_string();
    assert!(err.contains("line 4") && err.contains("ANDD"), "{err}");

    assert!(parse_netlist(&text.replace("DLGN v1", "DLGN v2")).is_err());
    assert!(parse_netlist(&text.replace("AND 0 1", "AND 0 7")).is_err());
    assert!(parse_netlist("DLGN v1\nconfig 2 1 0 2\n").is_err());
    assert!(parse_netlist("DLGN v1\nconfig 2 0 2 2\n").is_err());
}

#[test]
fn netlist_file_roundtrip_and_predictions_csv() {
    let dir = tempfile::tempdir().unwrap();
    let c = single_gate_circuit(GateId::XNOR);
    let p = dir.path().join("c.net");
    write_netlist(&p, &c).unwrap();
    assert_eq!(read_netlist(&p).unwrap(), c);

    let q = dir.path().join("pred.csv");
    write_predictions(&q, &[1, 0, 2]).unwrap();
    assert_eq!(std::fs::read_to_string(q).unwrap(), "sample_index,predicted_class\n0,1\n1,0\n2,2\n");
}

#[test]
fn exported_ste_model_matches_training_forward() {
    let cfg = NetworkConfig::new(9, 4, 12, 3, Method::MultilinearSte);
    let model = Model::init(cfg, 5).unwrap();
    let rows: Vec<Vec<bool>> = (0..512u32).map(|i| (0..9).map(|j| (i >> j) & 1 == 1).collect()).collect();
    let batch = Batch {
        dim: 9,
        features: rows.iter().flatten().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        labels: vec![0; 512],
    };
    let train = predict(&model, &batch, Mode::Train, Exec::Sequential).unwrap();
    let c = export(&model).unwrap();
    let packed = eval_packed(&c, &PackedBits::from_batch(&batch), Exec::Parallel).unwrap();
    assert_eq!(train, packed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn packed_scalar_and_polynomial_agree((c, rows) in circuit_strategy()) {
        let packed = pack_rows(&rows, c.input_dim);
        let seq = eval_packed(&c, &packed, Exec::Sequential).unwrap();
        let par = eval_packed(&c, &packed, Exec::Parallel).unwrap();
        prop_assert_eq!(&seq, &par);
        for (i, row) in rows.iter().enumerate() {
            let s = c.eval_scalar(row).unwrap();
            prop_assert_eq!(seq[i], s);
            prop_assert_eq!(s, polynomial_oracle(&c, row));
        }
    }

    #[test]
    fn netlist_roundtrip((c, _) in circuit_strategy()) {
        let text = render_netlist(&c);
        let back = parse_netlist(&text).unwrap();
        prop_assert_eq!(render_netlist(&back), text);
        prop_assert_eq!(back, c);
    }

    #[test]
    fn pack_get_roundtrip(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 5), 1..200)) {
        let p = pack_rows(&rows, 5);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                prop_assert_eq!(p.get(i, j), v);
            }
        }
    }
}
