import math

import pytest

import cneval as cn


def test_lexical_examples():
    assert cn.tokenize("The cat, sat.") == ["the", "cat", "sat"]
    assert abs(cn.bleu(["the", "the", "the"], ["the", "cat"], 1) - 1 / 3) < 1e-9
    assert abs(cn.rouge_l(list("abcd"), list("acbd")) - 0.75) < 1e-9
    k = ["the", "cat", "sat"]
    assert abs(cn.meteor(k, k) - (1 - 0.5 / 27)) < 1e-9
    assert cn.lexical_metric("bleu1", "a b", "a b") == pytest.approx(1.0)
    with pytest.raises(cn.InputError):
        cn.bleu(k, k, 2)


def test_statistics():
    x = [1.0, 2.0, 3.0, 4.0]
    assert cn.pearson(x, [2 * v + 1 for v in x]) == pytest.approx(1.0)
    assert cn.spearman(x, [math.exp(v) for v in x]) == 1.0
    assert cn.kendall([1, 2, 3], [3, 2, 1]) == -1.0
    with pytest.raises(cn.UndefinedStatistic):
        cn.pearson([1, 1, 1], [1, 2, 3])
    assert cn.krippendorff_alpha([[1, 2, 3], [1, 2, 3]]) == 1.0
    assert cn.krippendorff_alpha([[1, None, 3], [1, 2, 3]], "ordinal") == 1.0
    assert cn.mae([1, 2], [2, 4]) == 1.5
    mean, std = cn.mean_and_std([4.0])
    assert mean == 4.0 and std is None
    avg = cn.multi_aspect_average(
        {"Opposition": 4.78, "Relatedness": 4.71, "Specificity": 4.18,
         "Toxicity": 4.64, "Fluency": 4.77})
    assert abs(avg - 4.62) <= 0.005


def test_parser_and_prompts():
    stars, feedback, confidence = cn.parse_star_score("2 stars. Off topic.")
    assert (stars, feedback, confidence) == (2, "Off topic.", "exact")
    with pytest.raises(cn.ScoreParseError):
        cn.parse_star_score("I cannot rate this.")
    names = [name for name, _ in cn.builtin_aspects()]
    assert len(names) == 5 and "Toxicity" in names
    p = cn.aspect_eval_prompt("HS TEXT", "CN TEXT", "Toxicity")
    assert p.index("HS TEXT") < p.index("CN TEXT")
    o = cn.overall_eval_prompt("HS TEXT", "CN TEXT")
    assert all(n in o for n in names)
    assert "HS TEXT" in cn.generation_prompt("HS TEXT")
    assert '"Fluency"' in cn.default_rubrics_json()
