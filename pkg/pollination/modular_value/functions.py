"""Functions that wrap the modular-value command line."""
from dataclasses import dataclass

from pollination_dsl.function import Function, command, Inputs, Outputs


@dataclass
class ScenarioReport(Function):
    """Write the JSON report of a preset scenario at one coupling."""

    name = Inputs.str(
        description='Scenario name.',
        spec={'type': 'string', 'enum': ['epr', 'hardy', 'cheshire', 'crz']}
    )

    g = Inputs.float(
        description='Coupling constant. The crz scenario uses the gate angle 2 g.',
        default=0.7853981633974483
    )

    gamma_bar = Inputs.float(
        description='Amplitude of the interacting meter component.', default=0.1,
        spec={'type': 'number', 'exclusiveMinimum': 0, 'exclusiveMaximum': 1}
    )

    @command
    def create_report(self):
        return 'modular-value scenario {{self.name}} --g {{self.g}} ' \
            '--gamma-bar {{self.gamma_bar}} --out report.json'

    report = Outputs.file(description='Scenario report.', path='report.json')


@dataclass
class ModularSweep(Function):
    """Sweep the C-Rz gate angle and write the meter readout as CSV."""

    start = Inputs.float(description='First gate angle.', default=0)

    stop = Inputs.float(description='Last gate angle.', default=6.283185307179586)

    count = Inputs.int(
        description='Number of gate angles.', default=201,
        spec={'type': 'integer', 'minimum': 2}
    )

    gamma_bar = Inputs.float(
        description='Amplitude of the interacting meter component.', default=0.1,
        spec={'type': 'number', 'exclusiveMinimum': 0, 'exclusiveMaximum': 1}
    )

    @command
    def sweep_crz(self):
        return 'modular-value sweep crz --range {{self.start}} {{self.stop}} ' \
            '{{self.count}} --gamma-bar {{self.gamma_bar}} --out sweep.csv'

    sweep = Outputs.file(
        description='CSV with columns g, re_mod, im_mod, abs_mod, re_weak, im_weak.',
        path='sweep.csv'
    )


@dataclass
class MeterTomography(Function):
    """Run the meter protocol and its seeded X, Y and Z shot tomography."""

    psi = Inputs.str(description='Pre-selected ket expression.')

    phi = Inputs.str(description='Post-selected ket expression.')

    obs = Inputs.str(description='Observable expression.')

    g = Inputs.float(description='Coupling constant.', default=0.7853981633974483)

    gamma_bar = Inputs.float(
        description='Amplitude of the interacting meter component.', default=0.1,
        spec={'type': 'number', 'exclusiveMinimum': 0, 'exclusiveMaximum': 1}
    )

    shots = Inputs.int(
        description='Shots per tomography basis.', default=1000000,
        spec={'type': 'integer', 'minimum': 1}
    )

    seed = Inputs.int(
        description='Sampling seed. Bases X, Y and Z use seed, seed + 1 and seed + 2.',
        default=0, spec={'type': 'integer', 'minimum': 0}
    )

    @command
    def run_tomography(self):
        return 'modular-value meter --psi "{{self.psi}}" --phi "{{self.phi}}" ' \
            '--obs "{{self.obs}}" --g {{self.g}} --gamma-bar {{self.gamma_bar}} ' \
            '--shots {{self.shots}} --seed {{self.seed}} --out tomography.json'

    tomography = Outputs.file(
        description='Meter outcome, shot histograms and the modular value estimate.',
        path='tomography.json'
    )
