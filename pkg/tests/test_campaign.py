import json
import math

import pytest

from zetamoments import campaign, zeros
from zetamoments.campaign import CampaignConfig, ReportSchemaError


@pytest.fixture(scope="module")
def cache_file(cache1000, tmp_path_factory):
    path = tmp_path_factory.mktemp("camp") / "z1000.csv"
    zeros.save(cache1000, path)
    return str(path)


@pytest.fixture(scope="module")
def default_run(cache_file):
    config = CampaignConfig(t_max=1000.0, cache_path=cache_file)
    return config, campaign.run_campaign(config)


class TestRunCampaign:
    def test_default_config_completes(self, default_run):
        _, outcomes = default_run
        assert len(outcomes) >= 10
        assert all(o.max_violation >= 0.0 or math.isnan(o.max_violation)
                   for o in outcomes)
        assert not any(o.notes.startswith("error:") for o in outcomes)

    def test_expected_audit_families_present(self, default_run):
        _, outcomes = default_run
        names = {o.audit_name.split("[")[0] for o in outcomes}
        assert names == {
            "zero_count", "gonek_explicit_formula", "mean_square",
            "log_zeta_majorant_lambda", "log_zeta_majorant_prime",
            "prime_lambda_difference", "functional_equation_residual",
            "stirling_digamma", "partial_fraction_reconstruction",
            "zero_sum_f_identity", "j_moment", "shifted_moment",
            "large_value_histogram", "dyadic_reconstruction",
            "cauchy_transfer", "continuous_moment",
        }

    def test_empty_k_list_runs_parameter_free_audits_only(self, cache_file):
        config = CampaignConfig(t_max=1000.0, k_list=(), cache_path=cache_file)
        outcomes = campaign.run_campaign(config)
        names = {o.audit_name.split("[")[0] for o in outcomes}
        assert "zero_count" in names
        assert "gonek_explicit_formula" in names
        assert not names & {"j_moment", "shifted_moment", "cauchy_transfer",
                            "dyadic_reconstruction", "large_value_histogram",
                            "continuous_moment"}

    def test_rerun_byte_identical(self, default_run, cache_file):
        config, outcomes = default_run
        text_a = campaign.render_report(config, outcomes)
        text_b = campaign.render_report(config, campaign.run_campaign(config))
        assert text_a == text_b

    def test_report_is_valid_json_with_17_digit_floats(self, default_run):
        config, outcomes = default_run
        text = campaign.render_report(config, outcomes)
        doc = json.loads(text)
        assert doc["schema"] == "audit.v1"
        assert len(doc["outcomes"]) == len(outcomes)


class TestCompareReports:
    def test_identical_files_empty_diff(self, default_run, tmp_path):
        config, outcomes = default_run
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        campaign.write_report(a, config, outcomes)
        campaign.write_report(b, config, outcomes)
        diff = campaign.compare_reports(a, b)
        assert diff["flagged"] == []
        assert diff["identical_campaign"]

    def test_growth_between_heights(self, default_run, tmp_path):
        config, outcomes = default_run
        a = tmp_path / "t1000.json"
        campaign.write_report(a, config, outcomes)
        config500 = CampaignConfig(t_max=500.0)
        outcomes500 = campaign.run_campaign(config500)
        b = tmp_path / "t500.json"
        campaign.write_report(b, config500, outcomes500)
        diff = campaign.compare_reports(a, b)
        assert not diff["identical_campaign"]
        j1 = diff["audits"]["j_moment[k=1,ell=1]"]
        assert j1["relative_difference"] > 1e-9
        assert "j_moment[k=1,ell=1]" in diff["flagged"]

    def test_corrupted_file_schema_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ReportSchemaError):
            campaign.compare_reports(bad, bad)

    def test_wrong_schema_rejected(self, tmp_path):
        doc = tmp_path / "wrong.json"
        doc.write_text('{"schema": "audit.v2", "outcomes": []}')
        with pytest.raises(ReportSchemaError):
            campaign.compare_reports(doc, doc)


class TestSerialization:
    def test_float_17_digits(self):
        assert campaign._emit(1.0 / 3.0) == "0.33333333333333331"
        assert campaign._emit([1, "a", None, True]) == '[1,"a",null,true]'
        assert campaign._emit(complex(1.5, -2.0)) == '{"re":1.5,"im":-2}'

    def test_nan_and_inf(self):
        assert campaign._emit(float("nan")) == '"nan"'
        assert campaign._emit(float("inf")) == '"inf"'

    def test_kronecker_deterministic(self):
        a = campaign._kronecker(7, 16)
        b = campaign._kronecker(7, 16)
        assert (a == b).all()
        assert ((a >= 0.0) & (a < 1.0)).all()
