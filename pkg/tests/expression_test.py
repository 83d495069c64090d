import math

import numpy as np
import pytest

from modular_value.expression import BasisDeclaration, Chain, ExpressionError, \
    KetLiteral, Negate, Number, evaluate, evaluate_expression, parse_expression, \
    parse_ket, parse_operator, pretty, tokenize
from modular_value.exceptions import ConfigError
from modular_value.tensor import Ket, Operator, pauli_x, pauli_z, tensor_ops

SQRT2 = math.sqrt(2)

CORPUS = [
    '|0>',
    '|1⟩',
    '|0,1>',
    '|01>',
    '|up>',
    '|H,L>',
    '(|0> + |1>)/sqrt(2)',
    '(|0> - i|1>) / sqrt(2)',
    '2 |0>',
    '2i |1>',
    '-|0>',
    '-(|0> + |1>)',
    '|0> - |1> + |0>',
    '|0> - (|1> - |0>)',
    'sx',
    'sx kron I',
    'sx ⊗ sz',
    'sx · sz',
    'sx sz',
    '-sx kron I',
    '-(sx kron I)',
    '2 * sx kron I',
    'sx kron (sz + I)',
    'sx + sz * 0.5',
    'exp(-i pi/4) sz',
    'sqrt(2) * sx / 3',
    'proj(|0> + i|1>)',
    'proj(|H,L>) + proj(|V,R>)',
    'I kron proj(|L>)',
    '((|0> + i|1>) kron (|0> + |1>))/2',
    '(|0,1> - |1,0>)/sqrt(2)',
    'sx |0>',
    '1e-3 * sz',
    '1.5e20',
    '.5 + .25i',
    'pi',
    '-i * pi / 4',
    'exp(i pi) + 1',
    '(|0,1> + |1,0> + |1,1>)/sqrt(3)',
    '(|0> - |1>) kron (|0> - |1>) / 2',
    '(i |H,L> + |H,R>)/sqrt(2)',
    '-i (|H,L> + |V,R>)/sqrt(2)',
    'sqrt(2 + sqrt(2))/2 |0> - sqrt(2 - sqrt(2))/2 |1>',
]


@pytest.mark.parametrize('source', CORPUS)
def test_pretty_round_trip(source):
    node = parse_expression(source)
    text = pretty(node)
    assert parse_expression(text) == node
    assert pretty(parse_expression(text)) == text
    evaluate(node, source)


def test_superposition():
    ket = evaluate_expression('(|0> + |1>)/sqrt(2)')
    assert isinstance(ket, Ket)
    np.testing.assert_allclose(ket.amplitudes, [1 / SQRT2, 1 / SQRT2], atol=1e-15)


def test_kron_spellings_agree():
    expected = tensor_ops([pauli_x(), Operator.identity((2,))])
    for source in ('sx kron I', 'sx ⊗ I'):
        assert evaluate_expression(source).allclose(expected, atol=0)


def test_implicit_multiplication():
    np.testing.assert_allclose(evaluate_expression('2 |0>').amplitudes, [2, 0])
    np.testing.assert_allclose(
        evaluate_expression('sx sz').matrix, pauli_x().matrix @ pauli_z().matrix)
    np.testing.assert_allclose(evaluate_expression('sx |0>').amplitudes, [0, 1])


def test_precedence():
    node = parse_expression('-sx kron I')
    assert isinstance(node, Chain) and isinstance(node.operands[0], Negate)
    node = parse_expression('2 * sx kron I')
    assert node == Chain(False, (Number(2.0), parse_expression('sx'),
                                 parse_expression('I')), ('*', 'kron'))
    value = evaluate_expression('2 * sx kron I')
    np.testing.assert_allclose(value.matrix, 2 * np.kron(pauli_x().matrix, np.eye(2)))
    assert evaluate_expression('1 - 2 - 3') == -4


def test_binary_ket_labels():
    assert parse_expression('|01>') == KetLiteral(('0', '1'))
    assert parse_expression('|0, 1>') == KetLiteral(('0', '1'))
    assert evaluate_expression('|10>').allclose(Ket.basis((2, 2), (1, 0)))


def test_scalars_and_constants():
    assert evaluate_expression('exp(i pi) + 1') == pytest.approx(0, abs=1e-15)
    assert evaluate_expression('2i * 2i') == -4
    assert abs(evaluate_expression('sqrt(-4)')) == pytest.approx(2)
    assert evaluate_expression('sqrt(4)') == pytest.approx(2)


def test_type_error_position():
    with pytest.raises(ExpressionError) as info:
        evaluate_expression('|0> + sx')
    error = info.value
    assert error.kind == 'type'
    assert error.offset == 4
    assert (error.line, error.column) == (1, 5)
    assert '^' in error.format()


@pytest.mark.parametrize('source, kind, offset', [
    ('|0> $', 'lex', 4),
    ('|0', 'lex', 0),
    ('1e999', 'lex', 0),
    ('| >', 'lex', 0),
    ('(|0>', 'parse', 4),
    ('|0> +', 'parse', 5),
    ('', 'parse', 0),
    ('|0> )', 'parse', 4),
    ('* sx', 'parse', 0),
    ('foo', 'name', 0),
    ('sx + bar', 'name', 5),
    ('|X>', 'name', 0),
    ('|0> + |0,1>', 'dimension', 4),
    ('sx + sz kron I', 'dimension', 3),
    ('|0> kron sx', 'type', 4),
    ('sx / sz', 'type', 3),
    ('|0> |1>', 'type', 4),
    ('proj(sx)', 'type', 0),
    ('sqrt(|0>)', 'type', 0),
    ('1 / 0', 'value', 2),
    ('proj(0 |0>)', 'value', 0),
    ('exp(1000)', 'value', 0),
])
def test_diagnostics(source, kind, offset):
    with pytest.raises(ExpressionError) as info:
        evaluate_expression(source)
    assert info.value.kind == kind
    assert info.value.offset == offset


def test_expected_tokens_are_reported():
    with pytest.raises(ExpressionError) as info:
        parse_expression('(|0>')
    assert info.value.expected == (')',)
    assert 'expected one of' in info.value.format()


def test_multiline_position():
    with pytest.raises(ExpressionError) as info:
        parse_expression('sx +\n $')
    assert (info.value.line, info.value.column) == (2, 2)


def test_depth_limit():
    parse_expression('(' * 50 + '|0>' + ')' * 50)
    with pytest.raises(ExpressionError) as info:
        parse_expression('(' * 150 + '|0>' + ')' * 150)
    assert info.value.kind == 'parse'
    with pytest.raises(ExpressionError):
        parse_expression('-' * 150 + '1')


def test_basis_declaration():
    basis = BasisDeclaration.from_strings(['H,V', 'L,R'])
    assert basis.n_factors == 2
    ket = parse_ket('(i |H,L> + |H,R>)/sqrt(2)', basis)
    np.testing.assert_allclose(ket.amplitudes, [1j / SQRT2, 1 / SQRT2, 0, 0], atol=1e-15)
    with pytest.raises(ExpressionError) as info:
        parse_ket('|H>', basis)
    assert info.value.kind == 'dimension'
    with pytest.raises(ConfigError):
        BasisDeclaration.from_strings(['H,H'])
    with pytest.raises(ConfigError):
        BasisDeclaration.from_strings(['H'])


def test_declared_labels_take_precedence():
    basis = BasisDeclaration.from_strings(['a,b'])
    assert parse_ket('|b>', basis).allclose(Ket.basis((2,), (1,)))
    assert parse_ket('|1>', basis).allclose(Ket.basis((2,), (1,)))


def test_parse_operator_checks_hermiticity():
    op = parse_operator('sx kron I')
    assert op.hermitian
    with pytest.raises(ExpressionError) as info:
        parse_operator('i sx')
    assert info.value.kind == 'value'
    with pytest.raises(ExpressionError) as info:
        parse_operator('|0>')
    assert info.value.kind == 'type'
    with pytest.raises(ExpressionError):
        parse_ket('sx')


def test_bytes_input():
    assert parse_expression(b'|0>') == KetLiteral(('0',))
    with pytest.raises(ExpressionError) as info:
        parse_expression(b'\xff|0>')
    assert info.value.kind == 'lex'


def test_tokens_carry_offsets():
    tokens = list(tokenize('2 |0> kron sx'))
    assert [t.kind for t in tokens] == ['number', 'ket', 'name', 'name']
    assert [t.offset for t in tokens] == [0, 2, 6, 11]


def test_random_bytes_raise_only_expression_errors():
    rng = np.random.default_rng(41)
    alphabet = np.frombuffer(b'|01>HV,()+-*/ i2.e sxkronpq\xe2\x8a\x97\xc2\xb7', dtype=np.uint8)
    for k in range(100000):
        length = int(rng.integers(0, 16))
        if k % 2:
            data = bytes(rng.integers(0, 256, size=length, dtype=np.uint8))
        else:
            data = bytes(rng.choice(alphabet, size=length))
        try:
            parse_expression(data)
        except ExpressionError:
            pass


def test_random_token_strings_evaluate_or_raise_expression_errors():
    rng = np.random.default_rng(42)
    tokens = ['|0>', '|1>', '|0,1>', 'sx', 'sz', 'I', '2', 'i', 'pi', '+', '-', '*',
              '/', 'kron', '(', ')', 'sqrt(', 'exp(', 'proj(', '0', '1e300']
    for _ in range(20000):
        source = ' '.join(rng.choice(tokens, size=int(rng.integers(1, 9))))
        try:
            evaluate_expression(source)
        except ExpressionError:
            pass
