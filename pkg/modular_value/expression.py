"""A small bra-ket expression language for kets and operators on qubit factors.

Grammar (lowest precedence first)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '·' | '/' | '⊗' | 'kron') unary | unary)*
    unary   := '-' unary | primary
    primary := NUMBER | NUMBER 'i' | 'i' | 'pi' | KET | NAME
             | FUNC '(' expr ')' | '(' expr ')'

KET is ``|label>`` or ``|label⟩``; several factors are written ``|H,L>`` or, for
binary digits, ``|01>``. NAME is one of I, sx, sy, sz, S and FUNC one of sqrt,
exp, proj. Juxtaposition multiplies, so ``2 |0>`` and ``sx sz`` are valid.
"""
import cmath
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .exceptions import ConfigError, DimensionLimitError, ModularValueError, \
    NotHermitianError, ShapeMismatchError
from .tensor import Ket, Operator, add, apply, matmul, pauli_x, pauli_y, pauli_z, \
    projector, scale, stokes, tensor_kets, tensor_ops

_logger = logging.getLogger(__name__)

MAX_DEPTH = 100

Value = Union[complex, Ket, Operator]

OPERATORS = {
    'I': lambda: Operator.identity((2,)),
    'sx': pauli_x,
    'sy': pauli_y,
    'sz': pauli_z,
    'S': stokes
}
FUNCTIONS = ('sqrt', 'exp', 'proj')
CONSTANTS = {'i': 1j, 'pi': math.pi}

# labels of the first and second basis state of every two-level factor
DEFAULT_KET_ALIASES = {
    '0': 0, 'up': 0, 'H': 0, 'L': 0, 'O': 0,
    '1': 1, 'dn': 1, 'V': 1, 'R': 1, 'NO': 1
}

_TOKEN_PATTERNS = {
    'imaginary': r'(?:\d+\.?\d*|\.\d+)(?:[eE][+\-]?\d+)?i(?![A-Za-z0-9_])',
    'number': r'(?:\d+\.?\d*|\.\d+)(?:[eE][+\-]?\d+)?',
    'ket': r'\|[A-Za-z0-9_, ]*(?:>|⟩)',
    'open_ket': r'\|',
    'name': r'[A-Za-z_][A-Za-z0-9_]*',
    'lpar': r'\(',
    'rpar': r'\)',
    'plus': r'\+',
    'minus': r'-',
    'times': r'\*|·',
    'divide': r'/',
    'kron': r'⊗',
    'skip': r'[ \t\r\n]+',
    'error': r'.'
}
_TOKEN_REGEX = re.compile(
    '|'.join(f'(?P<{name}>{text})' for name, text in _TOKEN_PATTERNS.items()),
    re.DOTALL | re.ASCII)
_PRIMARY_START = frozenset(['imaginary', 'number', 'ket', 'name', 'lpar'])


class ExpressionError(ModularValueError):
    """Diagnostic for an expression that does not lex, parse, type-check or evaluate.

    Args:
        kind: One of lex, parse, type, dimension, name or value.
        message: Human readable description.
        source: The expression text.
        offset: 0-based character offset of the offending token.
        expected: Token kinds that would have been accepted at ``offset``.
    """

    def __init__(
        self, kind: str, message: str, source: str, offset: int,
        expected: Sequence[str] = ()
    ):
        self.kind = kind
        self.message = message
        self.source = source
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        self.line = source.count('\n', 0, offset) + 1
        self.column = offset - (source.rfind('\n', 0, offset) + 1) + 1
        super().__init__(f'{kind} error at {self.line}:{self.column}: {message}')

    def format(self) -> str:
        lines = self.source.split('\n')
        text = lines[self.line - 1] if self.line <= len(lines) else ''
        report = [str(self), f'  {text}', '  ' + ' ' * (self.column - 1) + '^']
        if self.expected:
            report.append(f'  expected one of: {", ".join(self.expected)}')
        return '\n'.join(report)


class Token(NamedTuple):
    kind: str
    text: str
    offset: int


# syntax tree; positions are excluded from equality
@dataclass(frozen=True)
class Number:
    value: float
    imaginary: bool = False
    position: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Constant:
    name: str
    position: int = field(default=0, compare=False)


@dataclass(frozen=True)
class KetLiteral:
    labels: Tuple[str, ...]
    position: int = field(default=0, compare=False)


@dataclass(frozen=True)
class OperatorName:
    name: str
    position: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    function: str
    argument: 'Node'
    position: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Negate:
    operand: 'Node'
    position: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Chain:
    """Left-associative run of operators of one precedence level.

    ``operators[k]`` joins ``operands[k]`` and ``operands[k + 1]``. Additive chains
    use + and -; multiplicative chains use *, / and kron.
    """
    additive: bool
    operands: Tuple['Node', ...]
    operators: Tuple[str, ...]
    position: int = field(default=0, compare=False)
    operator_positions: Tuple[int, ...] = field(default=(), compare=False)


Node = Union[Number, Constant, KetLiteral, OperatorName, Call, Negate, Chain]


@dataclass(frozen=True)
class BasisDeclaration:
    """Per-factor ket labels, e.g. (('H', 'V'), ('L', 'R')).

    The first label of each pair is basis index 0. A declaration also fixes the
    number of two-level factors the expression must span.
    """
    pairs: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        pairs = tuple(tuple(pair) for pair in self.pairs)
        for pair in pairs:
            if len(pair) != 2 or pair[0] == pair[1] or \
                    not all(re.fullmatch(r'[A-Za-z0-9_]+', label) for label in pair):
                raise ConfigError(
                    f'A basis declaration needs two distinct labels. Got {pair}.')
        object.__setattr__(self, 'pairs', pairs)

    @classmethod
    def from_strings(cls, specs: Sequence[str]) -> 'BasisDeclaration':
        """Build from strings like ``"H,V"``."""
        return cls(tuple(tuple(s.strip() for s in spec.split(',')) for spec in specs))

    @property
    def n_factors(self) -> Optional[int]:
        return len(self.pairs) or None

    def index(self, label: str, factor: int) -> Optional[int]:
        if factor < len(self.pairs) and label in self.pairs[factor]:
            return self.pairs[factor].index(label)
        for pair in self.pairs:
            if label in pair:
                return pair.index(label)
        return DEFAULT_KET_ALIASES.get(label)


def tokenize(source: str) -> Iterator[Token]:
    for match in _TOKEN_REGEX.finditer(source):
        kind, text, offset = match.lastgroup, match.group(), match.start()
        if kind == 'skip':
            continue
        if kind == 'error':
            raise ExpressionError('lex', f'unexpected character {text!r}', source, offset)
        if kind == 'open_ket':
            raise ExpressionError(
                'lex', 'unterminated ket literal', source, offset, ['>', '⟩'])
        if kind in ('number', 'imaginary'):
            literal = text[:-1] if kind == 'imaginary' else text
            if not math.isfinite(float(literal)):
                raise ExpressionError(
                    'lex', f'numeric literal {text} is out of range', source, offset)
        yield Token(kind, text, offset)


def _ket_labels(text: str) -> Tuple[str, ...]:
    body = text[1:-1].strip()
    if ',' in body:
        return tuple(label.strip() for label in body.split(','))
    if len(body) > 1 and set(body) <= {'0', '1'}:
        return tuple(body)
    return (body,)


class _Parser:

    def __init__(self, source: str):
        self.source = source
        self.tokens = list(tokenize(source))
        self.index = 0
        self.depth = 0

    @property
    def token(self) -> Optional[Token]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def _offset(self) -> int:
        token = self.token
        return token.offset if token is not None else len(self.source)

    def _fail(self, message: str, expected: Sequence[str]):
        token = self.token
        found = f'{token.text!r}' if token is not None else 'end of input'
        raise ExpressionError(
            'parse', f'{message}; found {found}', self.source, self._offset(), expected)

    def _advance(self) -> Token:
        token = self.token
        self.index += 1
        return token

    def _nest(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ExpressionError(
                'parse', f'expression nests deeper than {MAX_DEPTH} levels',
                self.source, self._offset())

    def parse(self) -> Node:
        if self.token is None:
            self._fail('empty expression', ['expression'])
        node = self.expr()
        if self.token is not None:
            self._fail('unexpected token', ['+', '-', '*', '/', 'kron', 'end of input'])
        return node

    def expr(self) -> Node:
        start = self._offset()
        operands, operators, positions = [self.term()], [], []
        while self.token is not None and self.token.kind in ('plus', 'minus'):
            token = self._advance()
            operators.append('+' if token.kind == 'plus' else '-')
            positions.append(token.offset)
            operands.append(self.term())
        if not operators:
            return operands[0]
        return Chain(True, tuple(operands), tuple(operators), start, tuple(positions))

    def term(self) -> Node:
        start = self._offset()
        operands, operators, positions = [self.unary()], [], []
        while self.token is not None:
            token = self.token
            if token.kind in ('times', 'divide', 'kron') or \
                    (token.kind == 'name' and token.text == 'kron'):
                self._advance()
                operators.append(
                    {'times': '*', 'divide': '/'}.get(token.kind, 'kron'))
                positions.append(token.offset)
                operands.append(self.unary())
            elif token.kind in _PRIMARY_START:
                operators.append('*')
                positions.append(token.offset)
                operands.append(self.unary())
            else:
                break
        if not operators:
            return operands[0]
        return Chain(False, tuple(operands), tuple(operators), start, tuple(positions))

    def unary(self) -> Node:
        token = self.token
        if token is not None and token.kind == 'minus':
            self._advance()
            self._nest()
            node = Negate(self.unary(), token.offset)
            self.depth -= 1
            return node
        return self.primary()

    def _parenthesized(self) -> Node:
        if self.token is None or self.token.kind != 'lpar':
            self._fail('missing opening parenthesis', ['('])
        self._advance()
        self._nest()
        node = self.expr()
        self.depth -= 1
        if self.token is None or self.token.kind != 'rpar':
            self._fail('missing closing parenthesis', [')'])
        self._advance()
        return node

    def primary(self) -> Node:
        token = self.token
        expected = ['number', 'ket', 'name', '(', '-']
        if token is None:
            self._fail('expression ended early', expected)
        if token.kind == 'number':
            self._advance()
            return Number(float(token.text), False, token.offset)
        if token.kind == 'imaginary':
            self._advance()
            return Number(float(token.text[:-1]), True, token.offset)
        if token.kind == 'ket':
            self._advance()
            labels = _ket_labels(token.text)
            if any(not label for label in labels):
                raise ExpressionError(
                    'lex', 'empty ket label', self.source, token.offset, ['label'])
            return KetLiteral(labels, token.offset)
        if token.kind == 'lpar':
            return self._parenthesized()
        if token.kind == 'name':
            name = token.text
            if name in CONSTANTS:
                self._advance()
                return Constant(name, token.offset)
            if name in OPERATORS:
                self._advance()
                return OperatorName(name, token.offset)
            if name in FUNCTIONS:
                self._advance()
                return Call(name, self._parenthesized(), token.offset)
            raise ExpressionError(
                'name', f'unknown name {name!r}', self.source, token.offset,
                sorted(OPERATORS) + list(FUNCTIONS) + sorted(CONSTANTS))
        self._fail('unexpected token', expected)


def parse_expression(source: Union[str, bytes]) -> Node:
    """Parse an expression into its syntax tree.

    Raises:
        ExpressionError: With kind lex, parse or name and the offending position.
    """
    if isinstance(source, bytes):
        try:
            source = source.decode('utf-8')
        except UnicodeDecodeError as error:
            raise ExpressionError(
                'lex', 'input is not valid UTF-8', '', 0) from error
    return _Parser(source).parse()


def _describe(value: Value) -> str:
    if isinstance(value, Ket):
        return f'ket on dims {value.shape.dims}'
    if isinstance(value, Operator):
        return f'operator on dims {value.shape.dims}'
    return 'scalar'


class _Evaluator:

    def __init__(self, source: str, basis: BasisDeclaration):
        self.source = source
        self.basis = basis

    def _error(self, kind: str, message: str, offset: int):
        raise ExpressionError(kind, message, self.source, offset)

    def evaluate(self, node: Node) -> Value:
        if isinstance(node, Number):
            return complex(0, node.value) if node.imaginary else complex(node.value)
        if isinstance(node, Constant):
            return complex(CONSTANTS[node.name])
        if isinstance(node, OperatorName):
            return OPERATORS[node.name]()
        if isinstance(node, KetLiteral):
            return self._ket(node)
        if isinstance(node, Negate):
            return self._scale(self.evaluate(node.operand), -1)
        if isinstance(node, Call):
            return self._call(node)
        return self._chain(node)

    def _ket(self, node: KetLiteral) -> Ket:
        indices = []
        for factor, label in enumerate(node.labels):
            index = self.basis.index(label, factor)
            if index is None:
                self._error('name', f'unknown ket label {label!r}', node.position)
            indices.append(index)
        try:
            return Ket.basis((2,) * len(indices), indices)
        except DimensionLimitError as error:
            self._error('dimension', str(error), node.position)

    def _call(self, node: Call) -> Value:
        argument = self.evaluate(node.argument)
        if node.function == 'proj':
            if not isinstance(argument, Ket):
                self._error('type', f'proj needs a ket, got a {_describe(argument)}',
                            node.position)
            if argument.norm == 0:
                self._error('value', 'proj of the zero ket', node.position)
            return projector(argument)
        if not isinstance(argument, complex):
            self._error('type', f'{node.function} needs a scalar, got a '
                        f'{_describe(argument)}', node.position)
        try:
            return cmath.sqrt(argument) if node.function == 'sqrt' else cmath.exp(argument)
        except OverflowError:
            self._error('value', f'{node.function} overflows', node.position)

    def _scale(self, value: Value, factor: complex) -> Value:
        if isinstance(value, complex):
            return value * factor
        return scale(value, factor)

    def _chain(self, node: Chain) -> Value:
        result = self.evaluate(node.operands[0])
        for operator, operand, offset in zip(
                node.operators, node.operands[1:], node.operator_positions):
            right = self.evaluate(operand)
            try:
                result = self._combine(operator, result, right, offset)
            except (ShapeMismatchError, DimensionLimitError) as error:
                self._error('dimension', str(error), offset)
        return result

    def _combine(self, operator: str, left: Value, right: Value, offset: int) -> Value:
        left_scalar, right_scalar = isinstance(left, complex), isinstance(right, complex)
        if operator in ('+', '-'):
            if operator == '-':
                right = self._scale(right, -1)
            if left_scalar and right_scalar:
                return left + right
            if type(left) is not type(right):
                self._error('type', f'cannot add a {_describe(left)} and a '
                            f'{_describe(right)}', offset)
            return add(left, right)
        if operator == '/':
            if not right_scalar:
                self._error('type', f'cannot divide by a {_describe(right)}', offset)
            if right == 0:
                self._error('value', 'division by zero', offset)
            return self._scale(left, 1 / right)
        if operator == 'kron':
            if isinstance(left, Ket) and isinstance(right, Ket):
                return tensor_kets([left, right])
            if isinstance(left, Operator) and isinstance(right, Operator):
                return tensor_ops([left, right])
            self._error('type', f'cannot take the tensor product of a '
                        f'{_describe(left)} and a {_describe(right)}', offset)
        # '*'
        if left_scalar:
            return self._scale(right, left)
        if right_scalar:
            return self._scale(left, right)
        if isinstance(left, Operator) and isinstance(right, Operator):
            return matmul(left, right)
        if isinstance(left, Operator) and isinstance(right, Ket):
            return apply(left, right)
        self._error('type', f'cannot multiply a {_describe(left)} by a '
                    f'{_describe(right)}', offset)


def evaluate(
    node: Node, source: str = '', basis: Optional[BasisDeclaration] = None
) -> Value:
    """Evaluate a syntax tree to a complex scalar, a Ket or an Operator.

    When ``basis`` declares factors, a ket or operator result must span exactly
    that many two-level factors.
    """
    basis = basis or BasisDeclaration()
    try:
        value = _Evaluator(source, basis).evaluate(node)
    except ExpressionError:
        raise
    except (ValueError, ArithmeticError) as error:
        raise ExpressionError('value', str(error), source, node.position) from error
    expected = basis.n_factors
    if expected is not None and not isinstance(value, complex) and \
            value.shape.n_factors != expected:
        raise ExpressionError(
            'dimension', f'{_describe(value)} does not span the {expected} declared '
            'factors', source, node.position)
    return value


def evaluate_expression(
    source: Union[str, bytes], basis: Optional[BasisDeclaration] = None
) -> Value:
    node = parse_expression(source)
    if isinstance(source, bytes):
        source = source.decode('utf-8')
    value = evaluate(node, source, basis)
    _logger.debug('Evaluated %r to a %s.', source, _describe(value))
    return value


def parse_ket(source: str, basis: Optional[BasisDeclaration] = None) -> Ket:
    value = evaluate_expression(source, basis)
    if not isinstance(value, Ket):
        raise ExpressionError('type', f'expected a ket, got a {_describe(value)}',
                              source, 0)
    return value


def parse_operator(source: str, basis: Optional[BasisDeclaration] = None) -> Operator:
    """Evaluate an observable expression; the result is flagged Hermitian."""
    value = evaluate_expression(source, basis)
    if not isinstance(value, Operator):
        raise ExpressionError('type', f'expected an operator, got a {_describe(value)}',
                              source, 0)
    try:
        return value.as_hermitian()
    except NotHermitianError as error:
        raise ExpressionError('value', str(error), source, 0) from error


def _format_number(node: Number) -> str:
    text = repr(node.value)
    return text + 'i' if node.imaginary else text


_PRECEDENCE = {True: 1, False: 2}


def _precedence(node: Node) -> int:
    if isinstance(node, Chain):
        return _PRECEDENCE[node.additive]
    if isinstance(node, Negate):
        return 3
    return 4


def pretty(node: Node) -> str:
    """Normal form of a syntax tree; parsing the output gives back an equal tree."""
    if isinstance(node, Number):
        return _format_number(node)
    if isinstance(node, (Constant, OperatorName)):
        return node.name
    if isinstance(node, KetLiteral):
        return '|' + ','.join(node.labels) + '>'
    if isinstance(node, Call):
        return f'{node.function}({pretty(node.argument)})'
    if isinstance(node, Negate):
        inner = pretty(node.operand)
        return '-' + (inner if _precedence(node.operand) >= 3 else f'({inner})')
    level = _precedence(node)
    parts: List[str] = []
    for k, operand in enumerate(node.operands):
        text = pretty(operand)
        if _precedence(operand) <= level:
            text = f'({text})'
        if k:
            parts.append(node.operators[k - 1])
        parts.append(text)
    return ' '.join(parts)


__all__ = [
    'BasisDeclaration', 'ExpressionError', 'Node', 'Token',
    'evaluate', 'evaluate_expression', 'parse_expression', 'parse_ket',
    'parse_operator', 'pretty', 'tokenize'
]
