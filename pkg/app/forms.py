from wtforms import Form, FloatField, IntegerField, SelectField, StringField
from wtforms.validators import InputRequired, NumberRange, Optional, ValidationError
from .errors import DomainError
from .models.cloner import ClonerSpec
from .models.state import PhaseVector


def parse_int_list(text):
    """Comma-separated integers, e.g. "2,3,5"."""
    try:
        values = [int(part) for part in str(text).split(",") if part.strip()]
    except ValueError:
        raise DomainError(f"malformed integer list: {text!r}") from None
    if not values:
        raise DomainError("empty integer list")
    return values


class MachineQueryForm(Form):
    """d, n_in and exactly one of k / m_out."""

    d = IntegerField("d", validators=[InputRequired(), NumberRange(min=2)])
    n_in = IntegerField("n_in", validators=[InputRequired(), NumberRange(min=1)])
    k = IntegerField("k", validators=[Optional(), NumberRange(min=0)])
    m_out = IntegerField("m_out", validators=[Optional(), NumberRange(min=1)])
    phases = StringField("phases", validators=[Optional()])

    def validate_phases(self, field):
        if self.d.data is None:
            return
        try:
            PhaseVector.parse(field.data, self.d.data)
        except DomainError as e:
            raise ValidationError(str(e))

    def validate(self, extra_validators=None):
        if not super().validate(extra_validators):
            return False
        if (self.k.data is None) == (self.m_out.data is None):
            self.k.errors.append("give exactly one of k and m_out")
            return False
        return True

    def spec(self):
        if self.k.data is not None:
            return ClonerSpec(d=self.d.data, n_in=self.n_in.data, k=self.k.data)
        return ClonerSpec.from_outputs(self.d.data, self.n_in.data, self.m_out.data)

    def phase_vector(self):
        if self.phases.data:
            return PhaseVector.parse(self.phases.data, self.d.data)
        return PhaseVector.zeros(self.d.data)


class FidelityQueryForm(MachineQueryForm):
    method = SelectField(
        "method",
        choices=[("closed", "closed form"), ("sim", "simulation"), ("both", "both")],
        default="closed",
    )


class CurveQueryForm(Form):
    d = StringField("d", validators=[InputRequired()])
    n_in = IntegerField("n_in", validators=[Optional(), NumberRange(min=1)])
    max_k = IntegerField("max_k", validators=[Optional(), NumberRange(min=0)])
    m_out = IntegerField("m_out", validators=[Optional(), NumberRange(min=1)])
    format = SelectField("format", choices=[("csv", "CSV"), ("json", "JSON"), ("xlsx", "Excel")], default="csv")

    def validate_d(self, field):
        try:
            values = parse_int_list(field.data)
        except DomainError as e:
            raise ValidationError(str(e))
        if any(d < 2 for d in values):
            raise ValidationError("every d must be >= 2")

    def validate(self, extra_validators=None):
        if not super().validate(extra_validators):
            return False
        if self.m_out.data is None and (self.n_in.data is None or self.max_k.data is None):
            self.m_out.errors.append("give either m_out (saturation sweep) or n_in and max_k (k sweep)")
            return False
        return True

    @property
    def d_values(self):
        return parse_int_list(self.d.data)


class BlocksQueryForm(Form):
    d = IntegerField("d", validators=[InputRequired(), NumberRange(min=2)])
    n_in = IntegerField("n_in", validators=[InputRequired(), NumberRange(min=1)])
    m_out = IntegerField("m_out", validators=[InputRequired(), NumberRange(min=1)])

    def validate_m_out(self, field):
        if self.n_in.data is not None and field.data < self.n_in.data:
            raise ValidationError(f"m_out must be >= n_in = {self.n_in.data}")


class VerifyRequestForm(Form):
    seed = IntegerField("seed", validators=[Optional(), NumberRange(min=0)])
    max_d = IntegerField("max_d", default=3, validators=[Optional(), NumberRange(min=2, max=5)])
    max_n = IntegerField("max_n", default=2, validators=[Optional(), NumberRange(min=1, max=3)])
    max_k = IntegerField("max_k", default=2, validators=[Optional(), NumberRange(min=0, max=3)])
    phase_samples = IntegerField("phase_samples", default=20, validators=[Optional(), NumberRange(min=1, max=200)])
    tol = FloatField("tol", validators=[Optional(), NumberRange(min=0.0)])
