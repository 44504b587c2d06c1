import json

import numpy as np
import pytest

from sfwmkit import cli
from sfwmkit.errors import ConfigError


def _run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def config_path(tmp_path):
    document = {
        "fiber": {
            "fast_axis": {"core_diameter_um": 1.7507, "air_filling_fraction": 0.511},
            "slow_axis": {"core_diameter_um": 1.7488, "air_filling_fraction": 0.505},
            "gamma_per_w_km": 99.0,
            "length_m": 0.4,
            "birefringence_override": -1.7e-5,
        },
        "pump": {
            "center_wavelength_nm": 783.0,
            "gaussian_fwhm_nm": 20.0,
            "filter_width_nm": 8.0,
        },
        "grid": {"n_signal": 128, "n_idler": 128},
        "output": {"format": "json"},
        "seed": 0,
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(document))
    return str(path)


class TestConfigParsing:
    def test_preset_loads(self):
        config = cli.load_config("paper40cm.json")
        assert config.fiber.length == 0.4
        assert config.pump.center_wavelength == pytest.approx(783e-9)
        assert config.fiber.birefringence_override == -1.7e-5

    def test_unknown_top_key_rejected(self):
        with pytest.raises(ConfigError, match="mystery"):
            cli.parse_config({"fiber": {}, "pump": {}, "mystery": 1})

    def test_unknown_nested_key_named_with_path(self):
        document = json.loads(
            json.dumps(
                {
                    "fiber": {
                        "fast_axis": {
                            "core_diameter_um": 1.75,
                            "air_filling_fraction": 0.5,
                            "color": "blue",
                        },
                        "slow_axis": {
                            "core_diameter_um": 1.75,
                            "air_filling_fraction": 0.5,
                        },
                        "gamma_per_w_km": 99.0,
                        "length_m": 0.4,
                    },
                    "pump": {"center_wavelength_nm": 783, "gaussian_fwhm_nm": 20},
                }
            )
        )
        with pytest.raises(ConfigError, match="fiber.fast_axis.color"):
            cli.parse_config(document)

    def test_missing_section(self):
        with pytest.raises(ConfigError, match="pump"):
            cli.parse_config({"fiber": {}})

    def test_bad_output_format(self):
        with pytest.raises(ConfigError, match="format"):
            cli.parse_config(
                {
                    "fiber": {
                        "fast_axis": {
                            "core_diameter_um": 1.75,
                            "air_filling_fraction": 0.5,
                        },
                        "slow_axis": {
                            "core_diameter_um": 1.75,
                            "air_filling_fraction": 0.5,
                        },
                        "gamma_per_w_km": 99.0,
                        "length_m": 0.4,
                    },
                    "pump": {"center_wavelength_nm": 783, "gaussian_fwhm_nm": 20},
                    "output": {"format": "yaml"},
                }
            )


class TestExitCodes:
    def test_missing_config_exits_one(self, capsys):
        code, _, err = _run(["gvm", "--config", "does-not-exist.json"], capsys)
        assert code == 1
        assert "does-not-exist" in err

    def test_unknown_flag_exits_two(self, config_path):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["gvm", "--config", config_path, "--bogus"])
        assert excinfo.value.code == 2

    def test_unknown_subcommand_exits_two(self):
        with pytest.raises(SystemExit) as excinfo:
            cli.main(["transmogrify"])
        assert excinfo.value.code == 2


class TestSubcommands:
    def test_gvm_value(self, config_path, capsys):
        code, out, _ = _run(["gvm", "--config", config_path], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["lambda_p0_nm"] == pytest.approx(783.0, abs=3.0)

    def test_phasematch_csv_shape(self, config_path, capsys):
        code, out, _ = _run(
            ["phasematch", "--config", config_path, "--points", "5"], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "lambda_p_nm,lambda_s_nm,lambda_i_nm"
        assert len(lines) == 6

    def test_purity_includes_refinement_gate(self, config_path, capsys):
        code, out, _ = _run(["purity", "--config", config_path], capsys)
        assert code == 0
        payload = json.loads(out)
        assert 0.81 < payload["purity"] < 0.91
        assert payload["grid_converged"] is True
        assert len(payload["coefficients"]) == 16

    def test_dispersion_table(self, config_path, capsys):
        code, out, _ = _run(
            ["dispersion", "--config", config_path, "--points", "7"], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "wavelength_nm,axis,n_eff,k,dk_domega,d2k_domega2"
        assert len(lines) == 1 + 2 * 7  # both axes
        assert any(",fast," in line for line in lines[1:])
        assert any(",slow," in line for line in lines[1:])

    def test_hom_sim_fit_round_trip(self, config_path, tmp_path, capsys):
        data = tmp_path / "hom.csv"
        code, _, _ = _run(
            [
                "hom-sim",
                "--config",
                config_path,
                "--p",
                "0.85",
                "--chi",
                "0.05",
                "--out",
                str(data),
            ],
            capsys,
        )
        assert code == 0
        code, out, _ = _run(
            [
                "hom-fit",
                "--config",
                config_path,
                "--data",
                str(data),
                "--rep-rate",
                "76e6",
            ],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["p"] == pytest.approx(0.85, abs=4 * payload["sigma_p"])

    def test_figure_fig1b_has_31_rows(self, config_path, capsys):
        code, out, _ = _run(
            ["figure", "--config", config_path, "--id", "fig1b"], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 32
        first = lines[1].split(",")
        assert float(first[0]) == pytest.approx(765.0)

    def test_fig1a_correlation_column(self, config_path, capsys):
        code, out, _ = _run(
            ["figure", "--config", config_path, "--id", "fig1a"], capsys
        )
        assert code == 0
        labels = {line.split(",")[-1] for line in out.strip().splitlines()[1:]}
        assert labels <= {"correlated", "anticorrelated"}
        assert len(labels) == 2  # both regimes occur across the tuning range


class TestDeterminism:
    def test_byte_identical_repeat(self, config_path, capsys):
        _, first, _ = _run(["jsa", "--config", config_path], capsys)
        _, second, _ = _run(["jsa", "--config", config_path], capsys)
        assert first == second

    def test_twelve_significant_digits(self, config_path, capsys):
        _, out, _ = _run(["gvm", "--config", config_path], capsys)
        value = out.split(":")[1].strip().rstrip("}").strip()
        digits = value.replace(".", "").replace("-", "").lstrip("0")
        assert len(digits) <= 12
