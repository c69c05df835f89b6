class MlError(Exception):
    pass


class SchemaMismatchError(MlError):
    """Vector or dataset schema differs from the model's training schema."""


class EmptyDatasetError(MlError):
    pass
