import logging
from dataclasses import dataclass, field
from enum import Enum, unique
from typing import Optional, Sequence

from data.models.criterion import Criterion
from data.models.design_space import DesignSpace
from data.models.maximin_problem import Objective
from data.repositories.result import ResultRepository
from helpers.exceptions import ExternalParametersRequiredError, ConfigError
from helpers.model_registry import make_preset, PresetId
from helpers.pipeline import DesignPipeline

logger = logging.getLogger(__name__)

LOGIT2_CASE_I = (-3.0, 4.0, 6.0, 1.0)
LOGIT2_CASE_II = (-2.2054, 13.5803, 2.2547, 1.6262)
GROUP_TESTING = (0.07, 0.93, 0.96)
LOGIT7 = (-0.4926, -0.6280, -0.3283, 0.4378, 0.5283, -0.6120, -0.6837, -0.2061)

# The dose-finding suite: one linear, two Emax and one logistic model, in this order
DOSE_PRESETS = (PresetId.DOSE_LINEAR, PresetId.DOSE_EMAX, PresetId.DOSE_EMAX, PresetId.DOSE_LOGISTIC)


@unique
class ApplicationId(Enum):
    APP1_CASE_I = "app1_case_i"
    APP1_CASE_II = "app1_case_ii"
    APP2 = "app2"
    APP3 = "app3"
    APP4 = "app4"

    @staticmethod
    def parse(raw: str) -> 'ApplicationId':
        try:
            return ApplicationId(str(raw).strip().lower())
        except ValueError as error:
            known = ', '.join(application.value for application in ApplicationId)
            raise ConfigError(f"Unknown application '{raw}'; known applications are: {known}") from error


@dataclass(frozen=True, eq=False)
class Study:
    label: str
    space: DesignSpace
    objectives: tuple[Objective, ...]
    n_values: tuple[int, ...]
    reported: dict[str, float] = field(default_factory=dict)

    @property
    def is_maximin(self) -> bool:
        return len(self.objectives) > 1


@dataclass(frozen=True, eq=False)
class Application:
    id: ApplicationId
    studies: tuple[Study, ...]
    # Label of the study whose approximate loss serves as the efficiency reference for the others
    relative_to: Optional[str] = None


def build_application(application_id: ApplicationId, theta_stars: Sequence[Sequence[float]] = ()) -> Application:
    if application_id == ApplicationId.APP1_CASE_I:
        return _app1_case_i()
    if application_id == ApplicationId.APP1_CASE_II:
        return _app1_case_ii()
    if application_id == ApplicationId.APP2:
        return _app2()
    if application_id == ApplicationId.APP3:
        return _app3()
    return _app4(theta_stars)


def run_application(application: Application, pipeline: DesignPipeline, results: ResultRepository,
                    n_values: Sequence[int] = ()) -> list[dict]:
    rows: list[dict] = []
    approx_losses: dict[str, float] = {}
    exact_losses: dict[tuple[str, int], float] = {}

    def compare(study: Study, quantity: str, obtained: float) -> None:
        rows.append({'study': study.label, 'quantity': quantity, 'obtained': obtained, 'reported': study.reported.get(quantity)})

    for study in application.studies:
        logger.info(f"Running {application.id.value} study {study.label}")
        study_results = results.child(study.label)
        runs = tuple(n_values) or study.n_values

        if study.is_maximin:
            problem, outcome = pipeline.maximin(study.objectives, study.space, study_results)
            compare(study, 'min_efficiency', outcome.report.min_efficiency)
            compare(study, 'support_size', outcome.design.size)
            for n in runs:
                exact = pipeline.maximin_exact(problem, outcome.design, study.space, n, study_results.child(f"n{n}"))
                compare(study, f"min_efficiency n={n}", min(exact.efficiencies))
            continue

        objective = study.objectives[0]
        outcome = pipeline.approximate(objective.model, objective.criterion, study.space, study_results)
        approx_losses[study.label] = outcome.report.loss
        compare(study, 'loss', outcome.report.loss)
        compare(study, 'support_size', outcome.design.size)
        for n in runs:
            exact = pipeline.exact(objective.model, objective.criterion, study.space, n, study_results.child(f"n{n}"), reference=outcome.design)
            exact_losses[(study.label, n)] = exact.loss
            compare(study, f"loss n={n}", exact.loss)
            compare(study, f"modified_efficiency n={n}", exact.modified_efficiency)

    if application.relative_to is not None:
        reference = approx_losses[application.relative_to]
        for study in application.studies:
            compare(study, 'efficiency', reference / approx_losses[study.label])
            for (label, n), loss in exact_losses.items():
                if label == study.label:
                    compare(study, f"efficiency n={n}", reference / loss)

    results.save_comparison(rows)
    return rows


def _app1_case_i() -> Application:
    model = make_preset(PresetId.LOGIT2_INTERACTION, LOGIT2_CASE_I)
    study = Study(
        label='D',
        space=DesignSpace.grid((0.0, 0.0), (1.0, 1.0), 51),
        objectives=(Objective(model, Criterion.d()),),
        n_values=(10, 15, 20),
        reported={
            'support_size': 6,
            'modified_efficiency n=10': 0.9836,
            'modified_efficiency n=15': 0.9785,
            'modified_efficiency n=20': 1.0001,
        },
    )
    return Application(ApplicationId.APP1_CASE_I, (study,))


def _app1_case_ii() -> Application:
    model = make_preset(PresetId.LOGIT2_INTERACTION, LOGIT2_CASE_II)
    # Efficiencies against the finest grid; the reported column uses an external reference, so it only shows the trend
    reported = {21: (0.9716, 0.9822), 31: (0.9901, 0.9513), 41: (0.9961, 0.9793), 51: (0.9985, 0.9794), 81: (0.9984, 0.9822)}
    studies = tuple(
        Study(
            label=f"N{levels}x{levels}",
            space=DesignSpace.grid((0.0, 0.0), (2.0, 2.0), levels),
            objectives=(Objective(model, Criterion.d()),),
            n_values=(10,),
            reported={'efficiency': approx, 'efficiency n=10': exact},
        )
        for levels, (approx, exact) in reported.items()
    )
    return Application(ApplicationId.APP1_CASE_II, studies, relative_to='N81x81')


def _app2() -> Application:
    model = make_preset(PresetId.GROUP_TESTING, GROUP_TESTING)
    space = DesignSpace.integer_range(1, 61)
    n_values = (10, 11, 12, 13, 14)

    def reported(loss: float, losses: tuple, efficiencies: tuple) -> dict:
        values = {'loss': loss, 'support_size': 3}
        for n, exact_loss, score in zip(n_values, losses, efficiencies):
            values[f"loss n={n}"] = exact_loss
            values[f"modified_efficiency n={n}"] = score
        return values

    d_study = Study(
        label='D',
        space=space,
        objectives=(Objective(model, Criterion.d()),),
        n_values=n_values,
        reported=reported(0.1448, (0.1462, 0.1461, 0.1448, 0.1457, 0.1456), (0.9906, 0.9912, 1.0000, 0.9944, 0.9946)),
    )
    c_study = Study(
        label='c',
        space=space,
        objectives=(Objective(model, Criterion.c((1.0, 0.0, 0.0))),),
        n_values=n_values,
        reported=reported(0.0354, (0.0361, 0.0361, 0.0358, 0.0355, 0.0355), (0.9799, 0.9808, 0.9891, 0.9968, 0.9970)),
    )
    return Application(ApplicationId.APP2, (d_study, c_study))


def _app3() -> Application:
    model = make_preset(PresetId.LOGIT7, LOGIT7)
    study = Study(
        label='D',
        space=DesignSpace.grid((-1.0,) * 7, (1.0,) * 7, 4),
        objectives=(Objective(model, Criterion.d()),),
        n_values=(30,),
        reported={'loss': 4.9485, 'support_size': 29, 'modified_efficiency n=30': 0.9659},
    )
    return Application(ApplicationId.APP3, (study,))


def _app4(theta_stars: Sequence[Sequence[float]]) -> Application:
    if len(theta_stars) != len(DOSE_PRESETS):
        raise ExternalParametersRequiredError(
            "Application app4 needs four parameter vectors (linear, Emax, Emax, logistic) supplied as theta_stars"
        )

    models = [make_preset(preset, theta) for preset, theta in zip(DOSE_PRESETS, theta_stars)]
    space = DesignSpace.grid((0.0,), (500.0,), 201)
    a_study = Study(
        label='maximin_A',
        space=space,
        objectives=tuple(Objective(model, Criterion.a(model.q)) for model in models),
        n_values=(10, 20, 30),
        reported={'min_efficiency': 0.7155, 'min_efficiency n=10': 0.6813, 'min_efficiency n=20': 0.6983, 'min_efficiency n=30': 0.7121},
    )
    d_study = Study(
        label='maximin_D',
        space=space,
        objectives=tuple(Objective(model, Criterion.d()) for model in models),
        n_values=(10, 20, 30),
        reported={'min_efficiency': 0.8538, 'support_size': 5, 'min_efficiency n=10': 0.8371, 'min_efficiency n=20': 0.8420, 'min_efficiency n=30': 0.8459},
    )
    return Application(ApplicationId.APP4, (a_study, d_study))
