import json

import numpy as np
import pytest

from perception_games.docio import (
    GameFormatError,
    canonical_json,
    load_game,
    load_profile,
    parse_game,
    parse_profile,
    profile_to_document,
    save_game,
    to_document,
)
from perception_games.fixtures import FIXTURE_NAMES, get_fixture
from perception_games.model import PerceptionGame, TwoPlayerPerceptionGame
from perception_games.single import Strategy, profile_report
from perception_games.two_player import enumerate_pure_equilibria_2p


class TestRoundTrip:
    @pytest.mark.parametrize("name", FIXTURE_NAMES)
    def test_document_fixed_point(self, name):
        game = get_fixture(name)
        doc = to_document(game)
        again = to_document(parse_game(doc))
        assert doc == again

    @pytest.mark.parametrize("name", FIXTURE_NAMES)
    def test_file_round_trip(self, name, tmp_path):
        game = get_fixture(name)
        path = tmp_path / f"{name}.json"
        save_game(game, path)
        loaded = load_game(path)
        assert to_document(loaded) == to_document(game)
        if name == "two_player":
            assert isinstance(loaded, TwoPlayerPerceptionGame)
        else:
            assert isinstance(loaded, PerceptionGame)

    def test_canonical_json_shape(self):
        doc = to_document(get_fixture("blog"))
        text = canonical_json(doc)
        assert text.endswith("\n")
        assert json.loads(text) == doc
        assert canonical_json(doc) == canonical_json(doc)


class TestParseErrors:
    def _blog_doc(self):
        return to_document(get_fixture("blog"))

    def test_bad_format_version(self):
        doc = self._blog_doc()
        doc["format_version"] = "99"
        with pytest.raises(GameFormatError) as exc:
            parse_game(doc)
        assert any("format_version" in p for p, _ in exc.value.errors)

    def test_unknown_top_level_key(self):
        doc = self._blog_doc()
        doc["zzz"] = 1
        with pytest.raises(GameFormatError) as exc:
            parse_game(doc)
        assert any(p == "/zzz" for p, _ in exc.value.errors)

    def test_multiple_errors_collected(self):
        doc = self._blog_doc()
        doc["format_version"] = "99"
        doc["prior"] = [[0.5], [0.5]]  # wrong dimensionality
        doc["utility"]["penalties"][0]["kind"] = "bogus"
        doc["actions"] = "LR"
        with pytest.raises(GameFormatError) as exc:
            parse_game(doc)
        paths = {p for p, _ in exc.value.errors}
        assert len(exc.value.errors) >= 4
        assert {"/format_version", "/prior", "/utility/penalties/0", "/actions"} <= paths

    def test_mass_error_reported_at_construction(self):
        doc = self._blog_doc()
        doc["prior"] = [0.5, 0.6]
        with pytest.raises(GameFormatError):
            parse_game(doc)

    def test_duplicate_action_labels_reported_by_validation(self):
        doc = self._blog_doc()
        doc["actions"] = ["L", "L"]
        with pytest.raises(GameFormatError) as exc:
            parse_game(doc)
        assert any("actions" in p for p, _ in exc.value.errors)

    def test_non_dict_rejected(self):
        with pytest.raises(GameFormatError):
            parse_game([1, 2, 3])

    def test_missing_utility(self):
        doc = self._blog_doc()
        del doc["utility"]
        with pytest.raises(GameFormatError) as exc:
            parse_game(doc)
        assert any("utility" in p or "utility" in m for p, m in exc.value.errors)

    def test_bad_json_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(GameFormatError):
            load_game(path)

    def test_two_player_shape_error(self):
        doc = to_document(get_fixture("two_player"))
        doc["players"][0]["v"] = [[0.0, 1.0]]
        with pytest.raises(GameFormatError):
            parse_game(doc)

    def test_validation_errors_folded_in(self):
        doc = self._blog_doc()
        # negative penalty weight parses structurally but fails the
        # deep game validation
        doc["utility"]["penalties"][0]["weight"] = -2.0
        with pytest.raises(GameFormatError):
            parse_game(doc)


class TestProfiles:
    def test_single_round_trip(self, tmp_path):
        g = get_fixture("blog")
        rep = profile_report(g, Strategy.pure(g, (0, 0)).sigma)
        doc = profile_to_document(rep.strategy, rep.perceptions)
        s2, p2 = parse_profile(doc, g)
        np.testing.assert_array_equal(s2.sigma, rep.strategy.sigma)
        np.testing.assert_array_equal(p2.tau, rep.perceptions.tau)
        path = tmp_path / "prof.json"
        path.write_text(canonical_json(doc))
        s3, p3 = load_profile(path, g)
        np.testing.assert_array_equal(s3.sigma, rep.strategy.sigma)
        np.testing.assert_array_equal(p3.tau, rep.perceptions.tau)

    def test_two_player_round_trip(self):
        g = get_fixture("two_player")
        rep = enumerate_pure_equilibria_2p(g)[0]
        doc = profile_to_document(rep.strategy, rep.perceptions)
        s2, p2 = parse_profile(doc, g)
        for i in range(2):
            np.testing.assert_array_equal(s2.sigmas[i], rep.strategy.sigmas[i])
            np.testing.assert_array_equal(p2.taus[i], rep.perceptions.taus[i])

    def test_wrong_shape_rejected(self):
        g = get_fixture("blog")
        with pytest.raises(GameFormatError):
            parse_profile({"sigma": [[1.0, 0.0]], "tau": [[[0.5, 0.5]]]}, g)

    def test_kind_mismatch_rejected(self):
        g2 = get_fixture("two_player")
        with pytest.raises(GameFormatError):
            parse_profile({"sigma": [[1.0, 0.0]], "tau": []}, g2)

    def test_row_mass_rejected(self):
        g = get_fixture("blog")
        doc = {
            "sigma": [[0.9, 0.9], [1.0, 0.0]],
            "tau": np.full((2, 2, 2), 0.5).tolist(),
        }
        with pytest.raises(GameFormatError):
            parse_profile(doc, g)
