use emorec_core::eval::{gain, ndcg, q_measure, relevance, RelevanceContext};
use emorec_core::model::{posterior, train};
use emorec_core::topics::{
    distance_matrix, doc_topic_density, emotion_topic_profiles, sentiment_topic_density,
    topic_positivity, Positivity,
};
use emorec_core::{Polarity, Variant};
use emorec_testkit::network::{self, to_f64};

#[test]
fn priors_density_and_profiles_are_exact() {
    let docs = network::documents();
    let part = network::partition();
    let model = train(&docs, Some(&part), &network::polarity(), 0.0, Variant::Topic).unwrap();

    let priors: Vec<f64> = model.priors().into_values().collect();
    assert_eq!(priors, network::exact_priors().map(to_f64));

    let d1 = doc_topic_density(&docs[0].bow, &part).unwrap();
    assert_eq!(d1.0, network::exact_d1_density().map(to_f64));

    let profiles = model.topic_profiles().unwrap();
    for (p, exact) in profiles.iter().zip(network::exact_profiles()) {
        for (got, want) in p.density.as_slice().iter().zip(exact) {
            assert!((got - to_f64(want)).abs() <= 1e-12, "{}: {got} vs {want}", p.emotion);
        }
    }
}

#[test]
fn query_posterior() {
    let docs = network::documents();
    let model = train(&docs, Some(&network::partition()), &network::polarity(), 0.0, Variant::Topic).unwrap();
    let pred = posterior(&model, &network::query()).unwrap();
    let exact = network::exact_posterior().map(to_f64);
    for (i, e) in ["e1", "e2", "e3"].iter().enumerate() {
        let p = pred.probability(e);
        assert!((p - exact[i]).abs() < 1e-12);
        assert!((p - network::ROUNDED_POSTERIOR[i]).abs() < 5e-3);
    }
    assert_eq!(pred.ranking, ["e1", "e2", "e3"]);
    assert!((pred.positive_posterior - exact[0]).abs() < 1e-12);
}

#[test]
fn smoothing_barely_moves_the_answer() {
    let docs = network::documents();
    let model = train(&docs, Some(&network::partition()), &network::polarity(), 1e-10, Variant::Topic).unwrap();
    let pred = posterior(&model, &network::query()).unwrap();
    let exact = network::exact_posterior().map(to_f64);
    assert!((pred.probability("e1") - exact[0]).abs() < 1e-8);
}

#[test]
fn sentiment_densities_and_positivity() {
    let docs = network::documents();
    let part = network::partition();
    let pol = network::relevance_polarity();
    let model = train(&docs, Some(&part), &pol, 0.0, Variant::Topic).unwrap();
    let profiles = emotion_topic_profiles(&docs, &part).unwrap();
    let entries = || profiles.values().map(|p| (p.emotion.as_str(), &p.density));
    let priors = model.priors();
    let pos = sentiment_topic_density(entries(), &priors, Polarity::Positive, &pol).unwrap();
    let neg = sentiment_topic_density(entries(), &priors, Polarity::Negative, &pol).unwrap();
    // positive side mixes e1 (2/5) and e2 (1/5): (2·7/8 + 3/4)/3 = 5/6
    assert!((pos.get(0) - 5.0 / 6.0).abs() < 1e-12);
    assert!((pos.get(2) - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(neg.0, vec![1.0 / 3.0, 0.5, 1.0 / 6.0]);
    assert_eq!(topic_positivity(1, &pos, &neg), Positivity::Finite(0.0));
    match topic_positivity(0, &pos, &neg) {
        Positivity::Finite(v) => assert!((v - 2.5).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

#[test]
fn relevance_example() {
    let docs = network::documents();
    let profiles = emotion_topic_profiles(&docs, &network::partition()).unwrap();
    let ctx = RelevanceContext::new(profiles.values(), &network::relevance_polarity()).unwrap();
    let d21 = 2f64.sqrt() / 8.0;
    let d31 = ((13.0f64 / 24.0).powi(2) + 0.25 + (1.0f64 / 24.0).powi(2)).sqrt();
    assert!((ctx.distance("e2", "e1").unwrap() - d21).abs() < 1e-15);
    assert!((ctx.distance("e3", "e1").unwrap() - d31).abs() < 1e-15);
    let want = (d31.max(d21) - d21) / d31.max(d21);
    assert!((relevance("e2", "e1", &ctx).unwrap() - want).abs() < 1e-15);
    assert!((want - 0.7605739346597133).abs() < 1e-12);
    assert_eq!(relevance("e3", "e1", &ctx).unwrap(), 0.0);
    assert_eq!(relevance("e1", "e1", &ctx).unwrap(), 1.0);

    let labels = ["e1".to_string()].into();
    let ranking: Vec<String> = ["e3", "e2", "e1"].iter().map(|s| s.to_string()).collect();
    assert_eq!(gain(&ranking, 1, &labels, &ctx).unwrap(), 0.0);
    assert!(q_measure(&ranking, &labels, 3, &ctx).unwrap() > 0.0);
    assert!(ndcg(&ranking, &labels, 3, &ctx).unwrap() < 1.0);

    let m = distance_matrix(profiles.values()).unwrap();
    assert!((m.get("e1", "e2").unwrap() - d21).abs() < 1e-15);
    assert_eq!(m.get("e3", "e3"), Some(0.0));
}
