"""
ipstar-lab
Entry point for the experiment command line
"""

from ipstar_lab.main import main

if __name__ == '__main__':
    main()
