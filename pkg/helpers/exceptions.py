# Base class for every error that can end a run; the code doubles as the process exit status
class DesignError(Exception):
    code = 1

    def to_json(self) -> dict:
        return {
            'code': self.code,
            'error': self.__class__.__name__,
            'message': str(self),
        }


# The run configuration does not match the documented schema
class ConfigError(DesignError):
    code = 2


# Unknown preset id, or a parameter vector of the wrong length for the preset
class PresetError(DesignError):
    code = 3


# No invertible information matrix can be reached on the given candidates
class InfeasibleDesignError(DesignError):
    code = 4


# The requested application needs parameter values that must be supplied by the user
class ExternalParametersRequiredError(DesignError):
    code = 5


# An operation that needs the inverse information matrix was given a singular one
class SingularInformationError(DesignError):
    code = 6


# A design point does not have the dimension of the model or the space
class DimensionError(DesignError):
    code = 7


# A probability-valued model quantity reached 0 or 1, so its information weight is undefined
class DegenerateProbabilityError(DesignError):
    code = 8
