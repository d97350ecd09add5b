from abc import ABC, abstractmethod
import re
from typing import Sequence

import numpy

from spraylab import jets
from spraylab.jets import EvaluationError, Scalar

FUNCTIONS = {
    'sqrt': (1, jets.sqrt),
    'exp': (1, jets.exp),
    'log': (1, jets.log),
    'sin': (1, jets.sin),
    'cos': (1, jets.cos),
    'tan': (1, jets.tan),
    'pow': (2, jets.power),
}

CONSTANTS = {'pi': numpy.pi}

TOKEN_PATTERN = re.compile(
    r'(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)'
    r'|(?P<identifier>[A-Za-z_][A-Za-z_0-9]*)'
    r'|(?P<operator>[-+*/^(),])'
    r'|(?P<space>\s+)'
)

VARIABLE_PATTERN = re.compile(r'^(?P<kind>[xy])(?P<index>[1-9]\d*)$')

STARTING_TOKENS = frozenset({'number', 'identifier', "'('", "'+'", "'-'"})


class ExpressionError(Exception):
    def __init__(self, message: str, offset: int = None):
        if offset is not None:
            message = f'{message} (offset {offset})'
        super().__init__(message)
        self.offset = offset


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, offset: int, expected: {str} = None):
        """
        malformed expression text

        :param message: description of the failure
        :param offset: 1-based byte offset of the offending token (one past the end for truncated input)
        :param expected: set of acceptable tokens at the offset
        """

        self.expected = frozenset(expected) if expected is not None else frozenset()
        if len(self.expected) > 0:
            message = f'{message}; expected one of {sorted(self.expected)}'
        super().__init__(message, offset)


class UnknownIdentifierError(ExpressionError):
    pass


class ArityError(ExpressionError):
    pass


class Node(ABC):
    """ node of an expression tree """

    def __init__(self, offset: int = None):
        self.offset = offset

    @abstractmethod
    def evaluate(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
        raise NotImplementedError

    @abstractmethod
    def pretty(self) -> str:
        """ fully parenthesized text that parses back to an equal tree """
        raise NotImplementedError

    @property
    @abstractmethod
    def children(self) -> ['Node']:
        raise NotImplementedError

    def variables(self) -> {str}:
        names = set()
        for child in self.children:
            names.update(child.variables())
        return names

    def _guarded(self, operation, *arguments) -> Scalar:
        try:
            return operation(*arguments)
        except ArithmeticError as error:
            raise EvaluationError(
                f'{error.__class__.__name__}: {error}', self.pretty(), self.offset
            )

    def __str__(self) -> str:
        return self.pretty()

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.pretty()!r})'


class Constant(Node):
    def __init__(self, value: float, offset: int = None):
        super().__init__(offset)
        self.value = float(value)

    def evaluate(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
        return self.value

    def pretty(self) -> str:
        return repr(self.value)

    @property
    def children(self) -> [Node]:
        return []

    def __eq__(self, other) -> bool:
        return isinstance(other, Constant) and self.value == other.value


class Variable(Node):
    def __init__(self, kind: str, index: int, offset: int = None):
        """
        base (`x`) or fiber (`y`) coordinate

        :param kind: `'x'` or `'y'`
        :param index: 0-based coordinate index
        :param offset: source offset
        """

        super().__init__(offset)
        self.kind = kind
        self.index = index

    def evaluate(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
        return x[self.index] if self.kind == 'x' else y[self.index]

    def pretty(self) -> str:
        return f'{self.kind}{self.index + 1}'

    @property
    def children(self) -> [Node]:
        return []

    def variables(self) -> {str}:
        return {self.pretty()}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Variable) and self.kind == other.kind and self.index == other.index
        )


class UnaryOperation(Node):
    def __init__(self, operator: str, operand: Node, offset: int = None):
        super().__init__(offset)
        self.operator = operator
        self.operand = operand

    def evaluate(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
        value = self.operand.evaluate(x, y)
        return -value if self.operator == '-' else value

    def pretty(self) -> str:
        return f'({self.operator}{self.operand.pretty()})'

    @property
    def children(self) -> [Node]:
        return [self.operand]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, UnaryOperation)
            and self.operator == other.operator
            and self.operand == other.operand
        )


class BinaryOperation(Node):
    def __init__(self, operator: str, left: Node, right: Node, offset: int = None):
        super().__init__(offset)
        self.operator = operator
        self.left = left
        self.right = right

        self.constant_exponent = operator == '^' and len(right.variables()) == 0
        self._exponent = None

    def folded_exponent(self) -> float:
        """ exponent free of variables, evaluated once on first use """
        if self._exponent is None:
            with numpy.errstate(divide='raise', invalid='raise', over='raise'):
                exponent = float(self.right.evaluate((), ()))
            self._exponent = int(exponent) if exponent.is_integer() else exponent
        return self._exponent

    def evaluate(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
        left = self.left.evaluate(x, y)
        if self.operator == '^':
            if self.constant_exponent:
                return self._guarded(jets.power, left, self.folded_exponent())
            right = self.right.evaluate(x, y)
            return self._guarded(lambda base, exponent: jets.exp(exponent * jets.log(base)), left, right)

        right = self.right.evaluate(x, y)
        if self.operator == '+':
            return self._guarded(lambda a, b: a + b, left, right)
        elif self.operator == '-':
            return self._guarded(lambda a, b: a - b, left, right)
        elif self.operator == '*':
            return self._guarded(lambda a, b: a * b, left, right)
        else:
            return self._guarded(lambda a, b: a / b, left, right)

    def pretty(self) -> str:
        return f'({self.left.pretty()} {self.operator} {self.right.pretty()})'

    @property
    def children(self) -> [Node]:
        return [self.left, self.right]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BinaryOperation)
            and self.operator == other.operator
            and self.left == other.left
            and self.right == other.right
        )


class FunctionCall(Node):
    def __init__(self, name: str, arguments: [Node], offset: int = None):
        super().__init__(offset)
        self.name = name
        self.arguments = arguments

    def evaluate(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
        arguments = [argument.evaluate(x, y) for argument in self.arguments]
        return self._guarded(FUNCTIONS[self.name][1], *arguments)

    def pretty(self) -> str:
        return f'{self.name}({", ".join(argument.pretty() for argument in self.arguments)})'

    @property
    def children(self) -> [Node]:
        return list(self.arguments)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FunctionCall)
            and self.name == other.name
            and self.arguments == other.arguments
        )


class Expr:
    """ parsed expression over base coordinates `x1..xn` and fiber coordinates `y1..yn` """

    def __init__(self, root: Node, dimension: int, text: str = None):
        self.root = root
        self.dimension = dimension
        self.text = text if text is not None else root.pretty()

    def evaluate(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
        """
        evaluate over plain reals, arrays of batched points, or jets (identical code path)

        :param x: base coordinates
        :param y: fiber coordinates
        :return: expression value
        """

        if len(x) != self.dimension or len(y) != self.dimension:
            raise ValueError(
                f'expected {self.dimension} base and fiber coordinates, received {len(x)} and {len(y)}'
            )
        with numpy.errstate(divide='raise', invalid='raise', over='raise'):
            return self.root.evaluate(x, y)

    def __call__(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
        return self.evaluate(x, y)

    def pretty(self) -> str:
        return self.root.pretty()

    def variables(self) -> {str}:
        return self.root.variables()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Expr) and self.dimension == other.dimension and self.root == other.root
        )

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.text!r}, dimension={self.dimension})'


def tokenize(text: str) -> [(str, str, int)]:
    """
    split expression text into `(kind, token, offset)` triples, ending with an `end` token

    :param text: expression text
    :return: list of tokens with 1-based byte offsets
    """

    tokens = []
    position = 0
    while position < len(text):
        match = TOKEN_PATTERN.match(text, position)
        if match is None:
            raise ExpressionSyntaxError(
                f'unexpected character {text[position]!r}', _byte_offset(text, position)
            )
        kind = match.lastgroup
        if kind != 'space':
            tokens.append((kind, match.group(), _byte_offset(text, position)))
        position = match.end()
    tokens.append(('end', '', _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, position: int) -> int:
    return len(text[:position].encode('utf-8')) + 1


class _Parser:
    def __init__(self, text: str, dimension: int):
        self.tokens = tokenize(text)
        self.dimension = dimension
        self.position = 0

    @property
    def current(self) -> (str, str, int):
        return self.tokens[self.position]

    def advance(self) -> (str, str, int):
        token = self.tokens[self.position]
        self.position += 1
        return token

    def accept(self, *operators: str) -> bool:
        kind, token, _ = self.current
        return kind == 'operator' and token in operators

    def expect(self, operator: str):
        kind, token, offset = self.current
        if kind != 'operator' or token != operator:
            raise ExpressionSyntaxError(
                f'unexpected {_describe(kind, token)}', offset, {f"'{operator}'"}
            )
        self.advance()

    def parse(self) -> Node:
        node = self.expression()
        kind, token, offset = self.current
        if kind != 'end':
            raise ExpressionSyntaxError(
                f'unexpected {_describe(kind, token)}',
                offset,
                {"'+'", "'-'", "'*'", "'/'", "'^'", 'end of input'},
            )
        return node

    def expression(self) -> Node:
        node = self.term()
        while self.accept('+', '-'):
            _, operator, offset = self.advance()
            node = BinaryOperation(operator, node, self.term(), offset)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.accept('*', '/'):
            _, operator, offset = self.advance()
            node = BinaryOperation(operator, node, self.factor(), offset)
        return node

    def factor(self) -> Node:
        if self.accept('+', '-'):
            _, operator, offset = self.advance()
            return UnaryOperation(operator, self.factor(), offset)
        node = self.base()
        if self.accept('^'):
            _, operator, offset = self.advance()
            node = BinaryOperation(operator, node, self.factor(), offset)
        return node

    def base(self) -> Node:
        kind, token, offset = self.current
        if kind == 'number':
            self.advance()
            return Constant(float(token), offset)
        elif kind == 'identifier':
            self.advance()
            if self.accept('('):
                return self.call(token, offset)
            elif token in CONSTANTS:
                return Constant(CONSTANTS[token], offset)
            elif token in FUNCTIONS:
                raise ExpressionSyntaxError(
                    f'function `{token}` used without arguments', self.current[2], {"'('"}
                )
            match = VARIABLE_PATTERN.match(token)
            if match is None:
                raise UnknownIdentifierError(f'unknown identifier `{token}`', offset)
            index = int(match.group('index')) - 1
            if index >= self.dimension:
                raise UnknownIdentifierError(
                    f'variable `{token}` out of range for dimension {self.dimension}', offset
                )
            return Variable(match.group('kind'), index, offset)
        elif self.accept('('):
            self.advance()
            node = self.expression()
            self.expect(')')
            return node
        raise ExpressionSyntaxError(f'unexpected {_describe(kind, token)}', offset, STARTING_TOKENS)

    def call(self, name: str, offset: int) -> Node:
        if name not in FUNCTIONS:
            raise UnknownIdentifierError(f'unknown function `{name}`', offset)
        self.expect('(')
        arguments = [self.expression()]
        while self.accept(','):
            self.advance()
            arguments.append(self.expression())
        self.expect(')')
        arity = FUNCTIONS[name][0]
        if len(arguments) != arity:
            raise ArityError(
                f'function `{name}` takes {arity} argument(s), received {len(arguments)}', offset
            )
        return FunctionCall(name, arguments, offset)


def _describe(kind: str, token: str) -> str:
    return 'end of input' if kind == 'end' else f'{kind} {token!r}'


def parse(text: str, dimension: int) -> Expr:
    """
    parse metric or factor expression text

    Grammar (whitespace-insensitive):
        expr   := term (('+'|'-') term)*
        term   := factor (('*'|'/') factor)*
        factor := ('+'|'-') factor | base ('^' factor)?
        base   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'

    :param text: expression text, e.g. `sqrt(y1^2 + y2^2)`
    :param dimension: number of base coordinates `n`
    :return: expression tree
    """

    if text is None or len(text.strip()) == 0:
        raise ExpressionSyntaxError('empty expression', 1, STARTING_TOKENS)
    if dimension < 1:
        raise ValueError(f'dimension must be positive, not {dimension}')
    return Expr(_Parser(text, dimension).parse(), dimension, text.strip())
