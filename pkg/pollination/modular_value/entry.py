from pollination_dsl.dag import Inputs, DAG, task, Outputs
from pollination_dsl.dag.inputs import ItemType
from dataclasses import dataclass

from .functions import ScenarioReport, ModularSweep
from ._tomography import ShotTomography


@dataclass
class RecipeEntryPoint(DAG):
    """Modular value study entry point."""

    # inputs
    g = Inputs.float(
        default=0.7853981633974483,
        description='Coupling constant g of the scenario reports and the tomography '
        'trials. The crz scenario runs the controlled-Rz gate at the angle 2 g.',
        spec={'type': 'number'}
    )

    theta_start = Inputs.float(
        default=0,
        description='First gate angle of the controlled-Rz sweep.',
        spec={'type': 'number'}
    )

    theta_stop = Inputs.float(
        default=6.283185307179586,
        description='Last gate angle of the controlled-Rz sweep.',
        spec={'type': 'number'}
    )

    theta_count = Inputs.int(
        default=201,
        description='Number of gate angles in the controlled-Rz sweep.',
        spec={'type': 'integer', 'minimum': 2}
    )

    gamma_bar = Inputs.float(
        default=0.1,
        description='Amplitude of the interacting component of the meter qubit. The '
        'extracted modular values do not depend on it.',
        spec={'type': 'number', 'exclusiveMinimum': 0, 'exclusiveMaximum': 1}
    )

    shots = Inputs.int(
        default=1000000,
        description='Shots per tomography basis in every trial.',
        spec={'type': 'integer', 'minimum': 1}
    )

    scenarios = Inputs.list(
        default=['epr', 'hardy', 'cheshire', 'crz'],
        description='Preset scenarios to report.',
        items_type=ItemType.String
    )

    seeds = Inputs.list(
        default=list(range(20)),
        description='One tomography trial runs for each seed.',
        items_type=ItemType.Integer
    )

    psi = Inputs.str(
        default='(|0,1> - |1,0>)/sqrt(2)',
        description='Pre-selected ket expression of the tomography trials.'
    )

    phi = Inputs.str(
        default='((|0> + i|1>) kron (|0> + |1>))/2',
        description='Post-selected ket expression of the tomography trials.'
    )

    obs = Inputs.str(
        default='sx kron I',
        description='Observable expression of the tomography trials.'
    )

    @task(template=ScenarioReport, loop=scenarios)
    def create_scenario_reports(self, name='{{item}}', g=g, gamma_bar=gamma_bar):
        """Write one report for each scenario."""
        return [
            {
                'from': ScenarioReport()._outputs.report,
                'to': 'reports/{{item}}.json'
            }
        ]

    @task(template=ModularSweep)
    def run_crz_sweep(
        self, start=theta_start, stop=theta_stop, count=theta_count,
        gamma_bar=gamma_bar
    ):
        return [
            {
                'from': ModularSweep()._outputs.sweep,
                'to': 'sweep/crz.csv'
            }
        ]

    @task(
        template=ShotTomography,
        loop=seeds,
        sub_folder='tomography/{{item}}'
    )
    def run_shot_tomography(
        self, psi=psi, phi=phi, obs=obs, g=g, gamma_bar=gamma_bar, shots=shots,
        seed='{{item}}'
    ):
        pass

    reports = Outputs.folder(
        source='reports', description='Scenario reports as JSON files.'
    )

    sweep = Outputs.folder(
        source='sweep', description='Controlled-Rz sweep as a CSV file.'
    )

    tomography = Outputs.folder(
        source='tomography', description='One tomography record per seed.'
    )
