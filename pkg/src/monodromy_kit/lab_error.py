class MonodromyLabError(Exception):
    """Root of every domain error raised by the lab.

    Subclasses live next to the code that raises them. The CLI reports them as
    ``<ClassName>: <description>`` and exits with status 1.
    """

    def __init__(self, description: str, **context):
        self.description = description
        self.context = context
        if context:
            details = ", ".join(f"{k}={_fmt(v)}" for k, v in context.items())
            description = f"{description} ({details})"
        super().__init__(description)

    @property
    def error_name(self) -> str:
        return self.__class__.__name__


def _fmt(value) -> str:
    match value:
        case complex() as z:
            return f"{z.real:.12g}{z.imag:+.12g}i"
        case float() as x:
            return f"{x:.12g}"
        case _:
            return str(value)
