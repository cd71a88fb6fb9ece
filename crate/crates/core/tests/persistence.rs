use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use stm::corpus::prepare_text;
use stm::model::InputMeta;
use stm::synth::{text_corpus, TextCorpusSpec};
use stm::{
    evaluate_accuracy, export_rules, load_model, load_sparse_file, predict_all, save_model, save_sparse_file, AlMode,
    StmModel, Tokenizer, TrainConfig,
};

#[test]
fn text_pipeline_round_trips_through_files() {
    let spec = TextCorpusSpec { documents: 400, vocabulary: 3_000, ..TextCorpusSpec::default() };
    let docs: Vec<(String, String)> = text_corpus(&spec).into_iter().map(|(y, t)| (y.to_string(), t)).collect();
    let tok = Tokenizer::default();
    let prepared = prepare_text(&docs, &tok, 400, 1, 0.25, 9).unwrap();

    let dir = TempDir::new().unwrap();
    save_sparse_file(&prepared.train, dir.path().join("train.sparse")).unwrap();
    let train = load_sparse_file(dir.path().join("train.sparse")).unwrap();
    assert_eq!(train, prepared.train);

    let cfg = TrainConfig {
        clauses: 50,
        margin: 25,
        specificity: 10.0,
        al_size: 40,
        max_literals: 20,
        al_mode: AlMode::Static,
        ..TrainConfig::for_clauses(50)
    };
    let mut model = StmModel::new(cfg, train.feature_count(), 2).unwrap();
    model.meta = InputMeta {
        vocabulary: Some(prepared.vocabulary.clone()),
        tokenizer: Some(tok),
        class_names: Some(prepared.class_names.clone()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    model.fit(&train, prepared.test.as_ref(), 4, &mut rng, |_| {}).unwrap();

    let path = dir.path().join("model.stm");
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert_eq!(loaded, model);
    assert_eq!(loaded.meta, model.meta);
    let test = prepared.test.unwrap();
    assert_eq!(predict_all(&loaded, &test), predict_all(&model, &test));
    assert_eq!(evaluate_accuracy(&loaded, &test).unwrap(), evaluate_accuracy(&model, &test).unwrap());
    assert_eq!(export_rules(&loaded, 10), export_rules(&model, 10));

    // Training continues identically from a reloaded model.
    let mut a = model.clone();
    let mut b = loaded;
    let mut ra = ChaCha8Rng::seed_from_u64(2);
    let mut rb = ChaCha8Rng::seed_from_u64(2);
    a.train_epoch(&train, &mut ra).unwrap();
    b.train_epoch(&train, &mut rb).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rules_use_vocabulary_tokens() {
    let spec = TextCorpusSpec { documents: 300, vocabulary: 500, ..TextCorpusSpec::default() };
    let docs: Vec<(String, String)> = text_corpus(&spec).into_iter().map(|(y, t)| (y.to_string(), t)).collect();
    let prepared = prepare_text(&docs, &Tokenizer::default(), 200, 1, 0.0, 1).unwrap();
    let cfg = TrainConfig { clauses: 30, margin: 15, specificity: 10.0, ..TrainConfig::for_clauses(30) };
    let mut model = StmModel::new(cfg, prepared.train.feature_count(), 2).unwrap();
    model.meta.vocabulary = Some(prepared.vocabulary.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    model.fit(&prepared.train, None, 3, &mut rng, |_| {}).unwrap();
    let rules = export_rules(&model, 5);
    assert!(!rules.is_empty());
    for r in &rules {
        assert!(r.conditions.iter().all(|c| prepared.vocabulary.get(c).is_some()), "{r}");
    }
    for pair in rules.windows(2) {
        assert!(pair[0].weight().unsigned_abs() >= pair[1].weight().unsigned_abs());
    }
}
