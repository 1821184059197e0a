use dlgn::checkpoint::Checkpoint;
use dlgn::data::{parity, single_gate, EncodedDataset};
use dlgn::diagnostics::{records_csv, DiagnosticsRecord};
use dlgn::netarch::{Method, NetworkConfig};
use dlgn::runconfig::RunConfig;
use dlgn::trainers::{train, Model, TrainOptions, Trainer};
use dlgn::codebook::GateId;
use dlgn::Exec;

fn opts(iters: u64, exec: Exec) -> TrainOptions {
    TrainOptions {
        iters,
        batch_size: 16,
        eval_every: 25,
        seed: 3,
        exec,
        ..Default::default()
    }
}

fn run_to(model: Model, data: &EncodedDataset, o: TrainOptions) -> (Trainer<'_>, Vec<DiagnosticsRecord>) {
    let mut t = Trainer::new(model, data, o).unwrap();
    let mut recs = Vec::new();
    t.run(|_, r| {
        recs.push(r.clone());
        Ok(())
    })
    .unwrap();
    (t, recs)
}

#[test]
fn metrics_are_byte_identical_across_runs() {
    let data = parity(5).unwrap();
    for m in Method::ALL {
        let cfg = NetworkConfig::new(5, 3, 16, 2, m);
        let a = train(cfg.clone(), &data, opts(100, Exec::Sequential)).unwrap();
        let b = train(cfg, &data, opts(100, Exec::Sequential)).unwrap();
        assert_eq!(
            records_csv(&a.records, 3).unwrap(),
            records_csv(&b.records, 3).unwrap(),
            "{}",
            m.name()
        );
        assert_eq!(a.model.params, b.model.params);
    }
}

#[test]
fn parallel_and_sequential_training_agree_bitwise() {
    let data = parity(6).unwrap();
    for m in [Method::MultilinearCovJac, Method::SoftMix, Method::GumbelSt] {
        let cfg = NetworkConfig::new(6, 3, 32, 2, m);
        let mut o = opts(60, Exec::Sequential);
        o.batch_size = 100;
        let a = train(cfg.clone(), &data, o.clone()).unwrap();
        o.exec = Exec::Parallel;
        let b = train(cfg, &data, o).unwrap();
        assert_eq!(a.model.params, b.model.params, "{}", m.name());
        assert_eq!(records_csv(&a.records, 3).unwrap(), records_csv(&b.records, 3).unwrap());
    }
}

#[test]
fn checkpoint_resume_equals_uninterrupted() {
    let data = parity(5).unwrap();
    for m in [Method::MultilinearCovJac, Method::GumbelSt, Method::IwpSte] {
        let cfg = NetworkConfig::new(5, 3, 16, 2, m);
        let model = Model::init(cfg, 9).unwrap();
        let (full, full_recs) = run_to(model.clone(), &data, opts(100, Exec::Sequential));

        let (half, half_recs) = run_to(model, &data, opts(50, Exec::Sequential));
        let mut rc = RunConfig::default();
        rc.set("method", m.name()).unwrap();
        rc.set("L", "3").unwrap();
        rc.set("k", "16").unwrap();
        let ck = Checkpoint {
            config: rc,
            seed: 3,
            model: half.model.clone(),
            adam: half.adam.clone(),
            iter: half.iter,
            history: half.history.clone(),
        };
        let ck = Checkpoint::from_bytes(&ck.to_bytes(), "mem".as_ref()).unwrap();
        let mut resumed = Trainer::resume(ck.model, ck.adam, ck.iter, ck.history, &data, opts(100, Exec::Sequential)).unwrap();
        let mut recs = half_recs;
        resumed
            .run(|_, r| {
                recs.push(r.clone());
                Ok(())
            })
            .unwrap();
        assert_eq!(resumed.model.params, full.model.params, "{}", m.name());
        assert_eq!(resumed.adam, full.adam);
        assert_eq!(resumed.history, full.history);
        assert_eq!(records_csv(&recs, 3).unwrap(), records_csv(&full_recs, 3).unwrap());
    }
}

#[test]
fn evaluation_schedule_includes_final_iteration() {
    let data = parity(4).unwrap();
    let r = train(NetworkConfig::new(4, 2, 8, 2, Method::MultilinearSte), &data, opts(60, Exec::Sequential)).unwrap();
    let iters: Vec<u64> = r.records.iter().map(|x| x.iter).collect();
    assert_eq!(iters, vec![25, 50, 60]);
    assert!(r.best >= r.last10);
    // Straight-through deploys exactly what it trains.
    assert!(r.records.iter().all(|x| x.dg == 0.0));
}

#[test]
fn covjac_learns_xor_from_one_neuron_pair() {
    let data = single_gate(GateId::XOR);
    let cfg = NetworkConfig::new(2, 1, 2, 2, Method::MultilinearCovJac);
    let mut o = opts(1500, Exec::Sequential);
    o.batch_size = 4;
    o.eval_every = 500;
    let r = train(cfg, &data, o).unwrap();
    assert_eq!(r.model.gate(0, 1).unwrap(), GateId::XOR);
    assert_eq!(r.model.gate(0, 0).unwrap(), GateId::XNOR);
    assert_eq!(r.records.last().unwrap().hard_acc_test, 1.0);
}

#[test]
fn mismatched_dataset_is_rejected() {
    let data = parity(4).unwrap();
    let cfg = NetworkConfig::new(5, 2, 8, 2, Method::SoftMix);
    assert!(Trainer::new(Model::init(cfg, 0).unwrap(), &data, opts(10, Exec::Sequential)).is_err());
    let cfg = NetworkConfig::new(4, 2, 9, 3, Method::SoftMix);
    assert!(Trainer::new(Model::init(cfg, 0).unwrap(), &data, opts(10, Exec::Sequential)).is_err());
}
