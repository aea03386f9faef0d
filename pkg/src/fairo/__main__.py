import sys

from fairo.cli import main

sys.exit(main())
