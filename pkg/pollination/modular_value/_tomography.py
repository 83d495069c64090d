from pollination_dsl.dag import Inputs, DAG, task, Outputs
from dataclasses import dataclass

from .functions import MeterTomography


@dataclass
class ShotTomography(DAG):
    """One seeded shot-tomography trial of the meter protocol."""

    psi = Inputs.str(
        description='Pre-selected ket expression.'
    )

    phi = Inputs.str(
        description='Post-selected ket expression.'
    )

    obs = Inputs.str(
        description='Observable expression.'
    )

    g = Inputs.float(
        description='Coupling constant.'
    )

    gamma_bar = Inputs.float(
        description='Amplitude of the interacting meter component.'
    )

    shots = Inputs.int(
        description='Shots per tomography basis.'
    )

    seed = Inputs.int(
        description='Sampling seed of this trial.'
    )

    @task(template=MeterTomography)
    def run_meter_tomography(
        self, psi=psi, phi=phi, obs=obs, g=g, gamma_bar=gamma_bar, shots=shots,
        seed=seed
    ):
        return [
            {
                'from': MeterTomography()._outputs.tomography,
                'to': 'tomography.json'
            }
        ]

    tomography = Outputs.file(
        source='tomography.json', description='Tomography record.'
    )
