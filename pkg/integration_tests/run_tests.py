#needed to import STRIPstack from top level directory
import sys
import os
sys.path.append(os.getcwd())

import unittest
import subprocess
import json
import math
import tempfile
from parameterized import parameterized
from abc import ABC, abstractmethod
from STRIPstack.state import Soliton1D
from STRIPstack.mathutils import soliton, strip
from STRIPstack.utils import snapshot
from STRIPstack.experiments import shrink_lab

# Configuration of each test case. Order is Name, launch file location, timeout (s)
TEST_CONFIGS = [
    ("soliton1d", "launch/soliton1d.yaml", 60),
    ("stationarity", "launch/stationarity_action.yaml", 300),
    ("stationarity_gamma0", "launch/stationarity_action_gamma0.yaml", 300),
    ("transverse_short", "launch/transverse_short.yaml", 900),
    ("transverse_long", "launch/transverse_long.yaml", 900),
    ("energy", "launch/energy_minimize.yaml", 300),
    ("sweep", "launch/shrink_sweep.yaml", 1200),
    ("lstar", "launch/shrink_lstar.yaml", 1800),
    ("lstarstar", "launch/lstarstar.yaml", 60),
    ("gammastar", "launch/gammastar.yaml", 600),
    ("greens", "launch/greens_slice.yaml", 60),
]


def run_main(args, timeout):
    command = ["python3", "main.py", "--verbosity", "0"] + args
    return subprocess.run(command, text=True, stdout=subprocess.PIPE, stderr=subprocess.PIPE, timeout=timeout)


def load_summary(log_dir):
    with open(os.path.join(log_dir, "summary.json"), "r") as file:
        return json.load(file)


class BaseLogValidator(ABC):
    """Exit code the run must finish with."""
    exit_code = 0

    @abstractmethod
    def validate(self, log_dir):
        """Each test case must implement this method"""
        pass


class ValidateSoliton1D(BaseLogValidator):
    def validate(self, log_dir):
        summary = load_summary(log_dir)
        assert summary["monotone_branch"]
        for row in summary["rows"]:
            # p=3: M = 4 sqrt(omega) + 2 gamma
            expected = 4*math.sqrt(row["omega"]) - 2.0
            assert abs(row["mass"] - expected) < 1e-10, f"mass {row['mass']} at omega {row['omega']}"
        assert abs(summary["mass_floor"]) < 1e-10


class ValidateStationarity(BaseLogValidator):
    def validate(self, log_dir):
        summary = load_summary(log_dir)
        assert summary["converged"], "action minimization did not converge"
        assert summary["diagnostics"]["grad_norm"] < 1e-8
        assert abs(summary["residuals"]["nehari"]) < 1e-3
        assert abs(summary["residuals"]["dilation"]) < 1e-3
        assert summary["S"] > 0

        # the gamma=0 minimizer of a narrow strip is the extended soliton
        prob = summary["problem"]
        s0 = soliton.action_1d(Soliton1D(prob["omega"], 0.0, prob["p"]))
        assert summary["S"] < s0, f"action {summary['S']} not below {s0}"

        u,_ = snapshot.load_field(os.path.join(log_dir, "field.json"))
        phi = soliton.extend_to_strip(Soliton1D(prob["omega"], prob["gamma"], prob["p"]), u.grid)
        err = strip.norm(u.values - phi.values, u.grid)/strip.norm(phi)
        assert err < 1e-2, f"relative L2 distance to the extended soliton {err}"

        verify_dir = os.path.join(log_dir, "verify")
        proc = run_main(["--out-dir", verify_dir, "verify", "--gamma", str(prob["gamma"]), "--omega", str(prob["omega"]),
                         "--p", str(prob["p"]), "--L", str(prob["L"]), os.path.join(log_dir, "field.json")], 300)
        assert proc.returncode == 0, proc.stderr
        assert load_summary(verify_dir)["green_discrepancy"] < 1e-3


class ValidateStationarityGamma0(BaseLogValidator):
    def validate(self, log_dir):
        summary = load_summary(log_dir)
        assert summary["converged"]
        prob = summary["problem"]
        s0 = soliton.action_1d(Soliton1D(prob["omega"], 0.0, prob["p"]))
        assert abs(summary["S"] - s0) < 1e-2*s0
        assert summary["dy_norm"] < 1e-8*summary["M"]


class ValidateTransverseShort(BaseLogValidator):
    def validate(self, log_dir):
        summary = load_summary(log_dir)
        assert summary["converged"]
        assert summary["dy_norm"] < 1e-8*summary["M"], f"transverse energy {summary['dy_norm']}"


class ValidateTransverseLong(BaseLogValidator):
    def validate(self, log_dir):
        summary = load_summary(log_dir)
        assert summary["converged"]
        assert summary["diagnostics"]["transverse_variation"] > 1e-2
        rearr = summary["rearrangement"]
        assert rearr["positivity"] < 1e-12
        assert rearr["even_symmetry"] < 1e-10
        assert rearr["monotone_y"] < 1e-4*rearr["sup_norm"]


class ValidateEnergy(BaseLogValidator):
    def validate(self, log_dir):
        summary = load_summary(log_dir)
        assert summary["converged"]
        assert abs(summary["M"] - 1.0) < 1e-10
        assert summary["E"] < 0
        assert summary["diagnostics"]["lagrange_omega"] > 0.25


class ValidateSweep(BaseLogValidator):
    def validate(self, log_dir):
        summary = load_summary(log_dir)
        records = summary["records"]
        assert len(records) == 6
        for r in records:
            assert r["converged"], f"L={r['L']} did not converge"
            # the y-constant discrete minimizer is admissible at every width
            assert r["e1d_gap"] <= 1e-8*max(1.0, abs(r["energy"])), f"L={r['L']} above the y-constant reference"
        tail = records[-4:]
        for a,b in zip(tail[:-1], tail[1:]):
            assert b["e1d_gap"] <= a["e1d_gap"]
            assert b["dy_norm_scaled"] <= a["dy_norm_scaled"]
        assert tail[-1]["e1d_gap"] < 1e-5 and tail[-1]["dy_norm_scaled"] < 1e-5
        for c in summary["cold_start"]:
            assert c["agree"] or not c["cold_lower"], f"cold start at L={c['L']} found a lower energy"


class ValidateLStar(BaseLogValidator):
    def validate(self, log_dir):
        summary = load_summary(log_dir)
        est = summary["l_star"]
        assert est["lower"] < est["upper"]
        assert est["lower"] <= est["estimate"] <= est["upper"]
        assert summary["transverse_instability_width"] > 0

        # the observed transition sits at or below the closed-form L** for the same problem
        prob = summary["problem"]
        b = shrink_lab.l_star_star_bound(prob["m"], prob["gamma"], prob["p"])
        assert est["estimate"]**2 <= b.squared_bound, f"L* {est['estimate']} above L** {b.bound}"


class ValidateLStarStar(BaseLogValidator):
    def validate(self, log_dir):
        b = load_summary(log_dir)["bound"]
        assert abs(b["quotient"] - 8*math.pi**2) < 1e-10
        expected = 16*math.pi**2*b["m"]/b["potential_1d"]
        assert abs(b["squared_bound"] - expected) < 1e-8*expected
        assert abs(b["bound"]**2 - b["squared_bound"]) < 1e-8*b["squared_bound"]
        assert b["optimized_squared_bound"] <= b["squared_bound"]*(1 + 1e-12)


class ValidateGammaStar(BaseLogValidator):
    def validate(self, log_dir):
        summary = load_summary(log_dir)
        res = summary["gamma_star"]
        assert 0 < res["gamma_star"] < 2*math.sqrt(res["omega"])
        assert res["identity_residual"] < 1e-10
        chk = summary["existence_check"]
        assert chk["converged"] and chk["below_dichotomy"]
        assert chk["action"] < 2*summary["s0"]


class ValidateGreens(BaseLogValidator):
    def validate(self, log_dir):
        summary = load_summary(log_dir)
        omega = summary["spec"]["omega"]
        assert abs(summary["decay_slope"] + math.sqrt(omega)) < 1e-2
        assert abs(summary["mode_jump_0"]) < 1e-6
        with open(os.path.join(log_dir, "greens.csv"), "r") as file:
            assert len(file.read().splitlines()) == 302


class IntegrationTestSuite(unittest.TestCase):
    VALIDATORS = {
        "soliton1d": ValidateSoliton1D(),
        "stationarity": ValidateStationarity(),
        "stationarity_gamma0": ValidateStationarityGamma0(),
        "transverse_short": ValidateTransverseShort(),
        "transverse_long": ValidateTransverseLong(),
        "energy": ValidateEnergy(),
        "sweep": ValidateSweep(),
        "lstar": ValidateLStar(),
        "lstarstar": ValidateLStarStar(),
        "gammastar": ValidateGammaStar(),
        "greens": ValidateGreens(),
    }

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    @parameterized.expand(TEST_CONFIGS)
    def test_command_execution(self, name, config_path, timeout):
        validator = self.VALIDATORS.get(name)
        if validator is None:
            self.fail(f"no validator found for {name}")
        log_dir = os.path.join(self.tmpdir, name)
        process = run_main(["--config", config_path, "--out-dir", log_dir], timeout)
        #Uncomment to debug output from execution
        # print(process.stdout)
        self.assertEqual(process.returncode, validator.exit_code, process.stderr)
        validator.validate(log_dir)


if __name__ == "__main__":
    unittest.main()
